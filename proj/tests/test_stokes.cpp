#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/random_fields.hpp"
#include "nnst/spectral.hpp"
#include "nnst/stokes.hpp"
#include "oracles.hpp"

using namespace nnst;
using testing_util::kPi;
using testing_util::relative_l2;

namespace {

StokesProblem make_problem(const GridField& rho, double p, ViscosityLaw law = ViscosityLaw::constant(1.0),
                           std::vector<double> g = {0.0, -1.0}) {
  FluidParams fp = FluidParams::newtonian(rho.grid.dim());
  fp.p = p;
  fp.g = std::move(g);
  fp.nu_max = std::max(1.0, law.upper_bound());
  return {rho, fp, std::move(law), std::nullopt};
}

GridField sine_density(const TorusGrid& g) {
  return GridField::from_function(g, [](auto& x) { return std::sin(x[0]); });
}

VelocityField vertical_sine(const TorusGrid& g, double amp) {
  VelocityField u = VelocityField::zero(g);
  u.components[1] = to_spectral(GridField::from_function(g, [amp](auto& x) { return amp * std::sin(x[0]); }));
  return u;
}

}  // namespace

TEST_SUITE("stokes") {
  TEST_CASE("Newtonian closed form") {
    const TorusGrid g(2, 64);
    const StokesProblem prob = make_problem(sine_density(g), 2.0);
    const StokesSolution sol = solve_stokes(prob);
    CHECK(sol.report.converged);
    const VelocityField exact = vertical_sine(g, -2.0);
    CHECK(relative_l2(sol.velocity, exact) <= 1e-8);
    CHECK(l2_norm(functional_gradient(prob, exact)) <= 1e-10);
    CHECK(l2_norm(newtonian_solve(prob) - exact) <= 1e-12);
  }

  TEST_CASE("functional value against quadrature") {
    const TorusGrid g(2, 32);
    const StokesProblem prob = make_problem(sine_density(g), 2.0);
    const VelocityField u = vertical_sine(g, -1.0);
    // |Du|^2 for u = (0, -sin x1) is cos^2(x1) / 2; rho g . u = sin^2(x1)
    const double dissipation = oracle::integrate_2d([](double x, double) { return 0.5 * std::cos(x) * std::cos(x); });
    const double work = oracle::integrate_2d([](double x, double) { return std::sin(x) * std::sin(x); });
    const double expected = 0.5 * dissipation - work;
    CHECK(expected == doctest::Approx(-1.5 * kPi * kPi).epsilon(1e-10));
    CHECK(functional_value(prob, u) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(functional_value(prob, VelocityField::zero(g)) == 0.0);

    // constant density: only the dissipation term survives
    Rng rng(1);
    const VelocityField w = random_velocity(g, 4, rng);
    const StokesProblem flat = make_problem(GridField(g, 2.0), 3.0);
    const StokesOperator op(flat, 0.0);
    CHECK(std::abs(op.work(w)) <= 1e-13);
    CHECK(functional_value(flat, w) == doctest::Approx(op.value(w)));
    CHECK(functional_value(flat, w) > 0.0);
    CHECK(l2_norm(functional_gradient(flat, VelocityField::zero(g))) == 0.0);
  }

  TEST_CASE("gradient matches central differences") {
    const TorusGrid g(2, 32);
    Rng rng(2);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      StokesProblem prob = make_problem(random_density(g, 3, 0.5, 2.0, rng), p,
                                        ViscosityLaw::bounded_power(1.0, 1.0, 3.0), {0.3, -1.0});
      prob.params.nu_max = 3.0;
      prob.params.delta = p < 2.0 ? 1e-2 : 0.0;
      const VelocityField u = random_velocity(g, 5, rng);
      const VelocityField w = random_velocity(g, 5, rng);
      const double eps = 1e-5;
      const double fd = (functional_value(prob, u + eps * w) - functional_value(prob, u - eps * w)) / (2.0 * eps);
      const double an = inner(functional_gradient(prob, u), w);
      CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      CHECK(functional_gradient(prob, u).divergence_defect() <= 1e-12);
    }
    const StokesProblem singular = make_problem(sine_density(g), 1.5);
    CHECK_THROWS_AS(functional_gradient(singular, VelocityField::zero(g)), Error);
  }

  TEST_CASE("shear flow against a one-dimensional minimiser") {
    const int n = 16;
    const TorusGrid g(2, n);
    auto rho_of = [](double y) { return std::sin(y) + 0.5 * std::cos(2.0 * y) + 0.2 * std::sin(3.0 * y); };
    const GridField rho = GridField::from_function(g, [&](auto& x) { return rho_of(x[1]); });
    const StokesProblem prob = make_problem(rho, 3.0, ViscosityLaw::constant(1.0), {-1.0, 0.0});
    SolverOptions opts;
    opts.rel_tol = 1e-11;
    const StokesSolution sol = solve_stokes(prob, opts);
    CHECK(sol.report.converged);

    const std::vector<double> U = oracle::shear_profile(3.0, n, two_thirds_cutoff(n), rho_of);
    const GridField u0 = to_grid(sol.velocity.components[0]);
    const GridField u1 = to_grid(sol.velocity.components[1]);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int row = g.unravel(i)[1];
      err = std::max(err, std::abs(u0.values[i] - U[row]));
      ref = std::max(ref, std::abs(U[row]));
      CHECK(std::abs(u1.values[i]) <= 1e-9);
    }
    CHECK(err <= 1e-6 * ref);
  }

  TEST_CASE("penalised linear problem") {
    const TorusGrid g(2, 32);
    Rng rng(3);
    StokesProblem prob = make_problem(random_density(g, 4, 0.5, 1.5, rng), 2.0, ViscosityLaw::constant(1.0), {0.4, -1.0});
    prob.penalty = Penalty{50.0, 3};
    const StokesSolution sol = solve_stokes_penalized(prob);
    CHECK(sol.report.converged);

    // u(k) = P f(k) / (|k|^2/2 + |k|^(2k)/N) on the velocity band
    const StokesOperator op(prob, 0.0);
    VelocityField expect = op.forcing();
    const auto modes = g.modes();
    for (auto& c : expect.components)
      for (std::size_t i = 1; i < modes.size(); ++i)
        c.coeffs[i] /= 0.5 * modes[i].k2 + std::pow(modes[i].k2, 3) / 50.0;
    CHECK(relative_l2(sol.velocity, expect) <= 1e-7);
    CHECK(std::isfinite(sol.report.hk_ratio));
    CHECK(sol.report.energy_residual <= 1e-6);

    StokesProblem flat = prob;
    flat.rho = GridField(g, 3.0);
    for (double N : {1.0, 1e3}) {
      flat.penalty = Penalty{N, 3};
      CHECK(l2_norm(solve_stokes_penalized(flat).velocity) == 0.0);
    }

    StokesProblem plain = prob;
    plain.penalty.reset();
    CHECK_THROWS_AS(solve_stokes_penalized(plain), Error);
    StokesProblem low = prob;
    low.penalty = Penalty{1.0, 2};
    CHECK_THROWS_AS(solve_stokes(low), Error);
  }

  TEST_CASE("constant density is at rest") {
    const TorusGrid g(2, 32);
    for (double p : {1.5, 2.0, 3.0}) {
      const StokesSolution sol = solve_stokes(make_problem(GridField(g, 1.0), p));
      CHECK(sol.report.converged);
      CHECK(l2_norm(sol.velocity) == 0.0);
      const SpectralField pi = recover_pressure(make_problem(GridField(g, 1.0), p), sol.velocity);
      CHECK(l2_norm(pi) == 0.0);
    }
  }

  TEST_CASE("degenerate viscosity") {
    const TorusGrid g(2, 16);
    const StokesProblem dead = make_problem(GridField(g, 0.0), 2.0, ViscosityLaw::bounded_power(1.0, 1.0, 1.0));
    try {
      solve_stokes(dead);
      FAIL("expected DegenerateViscosity");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateViscosity);
    }
    StokesProblem rescued = dead;
    rescued.penalty = Penalty{10.0, 3};
    CHECK(solve_stokes(rescued).report.converged);
  }

  TEST_CASE("energy balance and descent") {
    const TorusGrid g(2, 32);
    Rng rng(4);
    for (double p : {1.5, 2.0, 3.0}) {
      const StokesProblem prob =
          make_problem(random_density(g, 4, 0.5, 2.0, rng), p, ViscosityLaw::bounded_power(1.0, 1.0, 3.0));
      const StokesSolution sol = solve_stokes(prob);
      CHECK(sol.report.converged);
      CHECK(sol.report.monotone_descent);
      CHECK(sol.report.gradient_norm <= sol.report.tolerance);
      CHECK(sol.report.energy_residual <= 1e-6);
      if (p < 2.0) {
        CHECK(sol.report.delta_schedule.size() == 4);
        CHECK(sol.report.effective_delta == 1e-4);
      }
      CHECK(energy_balance_residual(prob, VelocityField::zero(g)) == 0.0);
      const VelocityField noise = random_velocity(g, 6, rng);
      StokesProblem eff = prob;
      eff.params.delta = sol.report.effective_delta;
      CHECK(energy_balance_residual(eff, noise) > 0.01);
    }
  }

  TEST_CASE("pressure recovery") {
    const TorusGrid g(2, 32);
    const GridField rho = GridField::from_function(g, [](auto& x) { return std::sin(x[0]) + std::sin(x[1]); });
    const StokesProblem prob = make_problem(rho, 2.0);
    const StokesSolution sol = solve_stokes(prob);
    const SpectralField pi = recover_pressure(prob, sol.velocity);
    const GridField expect = GridField::from_function(g, [](auto& x) { return std::cos(x[1]); });
    CHECK(testing_util::max_abs_diff(to_grid(pi), expect) <= 1e-10);
    CHECK(std::abs(pi.coeffs[0]) == 0.0);
    CHECK(pressure_residual(prob, sol.velocity, pi) <= 1e-8);

    Rng rng(5);
    const StokesProblem nl = make_problem(random_density(g, 3, 0.5, 2.0, rng), 3.0);
    SolverOptions opts;
    opts.rel_tol = 1e-10;
    const StokesSolution s3 = solve_stokes(nl, opts);
    const SpectralField p3 = recover_pressure(nl, s3.velocity);
    CHECK(std::abs(p3.coeffs[0]) == 0.0);
    CHECK(pressure_residual(nl, s3.velocity, p3) <= 1e-6);
  }

  TEST_CASE("a-priori bound") {
    const TorusGrid g(2, 16);
    const StokesProblem rest = make_problem(GridField(g, 1.0), 2.0);
    const AprioriBound b0 = apriori_check(rest, VelocityField::zero(g));
    CHECK(b0.lhs == 0.0);
    CHECK(b0.rhs_core > 0.0);
    CHECK_FALSE(b0.vacuous);

    StokesProblem vac = make_problem(sine_density(g), 3.0, ViscosityLaw::bounded_power(1.0, 1.0, 1.0));
    vac.params.gamma = 1.0;
    vac.params.sigma = 2.0;
    const AprioriBound bv = apriori_check(vac, VelocityField::zero(g));
    CHECK(bv.vacuous);
    CHECK(std::isinf(bv.rhs_core));
  }

  TEST_CASE("monotonicity gap") {
    const TorusGrid g(2, 16);
    Rng rng(6);
    const StokesProblem prob =
        make_problem(random_density(g, 3, 0.5, 2.0, rng), 3.0, ViscosityLaw::bounded_power(1.0, 1.0, 3.0));
    const VelocityField u = solve_stokes(prob).velocity;
    CHECK(monotonicity_gap(prob, u, u).gap == 0.0);

    // p = 2: gap = int nu |Du - Dphi|^2
    const StokesProblem lin =
        make_problem(prob.rho, 2.0, ViscosityLaw::bounded_power(1.0, 1.0, 3.0));
    const VelocityField phi = random_velocity(g, 5, rng);
    const MonotonicityGap m = monotonicity_gap(lin, u, phi);
    const GridField nu = viscosity_eval(lin.law, lin.rho);
    const GridField diff = strain_tensor(u - phi).frobenius();
    double expect = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) expect += nu.values[i] * diff.values[i] * diff.values[i];
    expect *= g.cell_volume();
    CHECK(m.gap == doctest::Approx(expect).epsilon(1e-12));
    CHECK(m.gap > 0.0);
  }

  TEST_CASE("Minty pairings of a constant sequence vanish") {
    const TorusGrid g(2, 16);
    Rng rng(7);
    const GridField rho = random_density(g, 3, 0.5, 2.0, rng);
    const StokesProblem prob = make_problem(rho, 3.0);
    const std::vector<VelocityField> tests{random_velocity(g, 4, rng), random_velocity(g, 4, rng)};
    const auto table = minty_sweep(prob, {rho, rho, rho}, rho, tests);
    REQUIRE(table.size() == 2);
    for (const auto& row : table) {
      REQUIRE(row.size() == 3);
      for (double v : row) CHECK(std::abs(v) <= 1e-12);
    }
  }

  TEST_CASE("linear case pairings decay like 1/n") {
    const TorusGrid g(2, 16);
    Rng rng(8);
    const GridField rho = random_density(g, 3, 0.5, 2.0, rng);
    const GridField w = random_density(g, 3, -1.0, 1.0, rng);
    std::vector<GridField> seq;
    for (int n : {1, 2, 4, 8}) {
      GridField r = rho;
      for (std::size_t i = 0; i < g.size(); ++i) r.values[i] += w.values[i] / n;
      seq.push_back(r);
    }
    const StokesProblem prob = make_problem(rho, 2.0);
    const auto table = minty_sweep(prob, seq, rho, {random_velocity(g, 4, rng)});
    for (std::size_t i = 1; i < table[0].size(); ++i)
      CHECK(table[0][i] / table[0][i - 1] == doctest::Approx(0.5).epsilon(1e-6));
  }
}
