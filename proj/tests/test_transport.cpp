#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/random_fields.hpp"
#include "nnst/spectral.hpp"
#include "nnst/transport.hpp"

using namespace nnst;
using testing_util::max_abs_diff;

namespace {

VelocityField frozen_shear(const TorusGrid& g) {
  VelocityField u = VelocityField::zero(g);
  u.components[0] = to_spectral(GridField::from_function(g, [](auto& x) { return std::sin(x[1]); }));
  return u;
}

double l1_distance(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.grid.cell_volume();
}

double relative_l2(const GridField& a, const GridField& b) {
  GridField diff = a;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= b.values[i];
  return lebesgue_norm(diff, 2.0) / lebesgue_norm(b, 2.0);
}

GridField repeat_steps(GridField rho, const VelocityField& u, const AdvectionScheme& s, int steps) {
  for (int i = 0; i < steps; ++i) rho = advect_step(rho, u, s);
  return rho;
}

constexpr SchemeKind kBoth[] = {SchemeKind::spectral_rk4, SchemeKind::semi_lagrangian};

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("scheme names") {
    for (SchemeKind k : kBoth) CHECK(parse_scheme_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_scheme_kind("upwind"), Error);
  }

  TEST_CASE("zero velocity leaves the density untouched") {
    const TorusGrid g(2, 32);
    Rng rng(1);
    const GridField rho = random_density(g, 4, 0.5, 2.0, rng);
    const VelocityField zero = VelocityField::zero(g);
    for (SchemeKind k : kBoth) {
      CHECK(advect_step(rho, zero, {k, 0.1, 0.5}).values == rho.values);
      int calls = 0;
      const EvolveResult res =
          evolve(rho, [&](const GridField&, double) { return zero; }, 1.0, {k, 0.25, 0.5},
                 {[&](double, const GridField&, const VelocityField&) { ++calls; }});
      CHECK(res.rho.values == rho.values);
      CHECK(calls == 4);
      REQUIRE(res.times.size() == 4);
      CHECK(res.times.back() == 1.0);
    }
  }

  TEST_CASE("uniform translation") {
    const TorusGrid g(2, 32);
    const GridField rho = GridField::from_function(g, [](auto& x) { return std::cos(x[0]); });
    const double c[] = {1.0, 0.0};
    const VelocityField u = VelocityField::uniform_translation(g, c);
    const double dt = 0.1;
    const GridField exact = GridField::from_function(g, [dt](auto& x) { return std::cos(x[0] - dt); });
    CHECK(max_abs_diff(advect_step(rho, u, {SchemeKind::spectral_rk4, dt, 1.0}), exact) <= 1e-6);
    CHECK(max_abs_diff(advect_step(rho, u, {SchemeKind::semi_lagrangian, dt, 1.0}), exact) <= 1e-3);
  }

  TEST_CASE("RK4 self-convergence on a shear flow") {
    const TorusGrid g(2, 32);
    const GridField rho = GridField::from_function(g, [](auto& x) { return std::cos(x[0]); });
    const VelocityField u = frozen_shear(g);
    std::vector<double> errs;
    for (double dt : {0.16, 0.08, 0.04}) {
      const GridField one = advect_step(rho, u, {SchemeKind::spectral_rk4, dt, 1.0});
      const GridField ref = repeat_steps(rho, u, {SchemeKind::spectral_rk4, dt / 10.0, 1.0}, 10);
      errs.push_back(max_abs_diff(one, ref));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(std::log2(errs[i - 1] / errs[i]) >= 4.0);
  }

  TEST_CASE("mass and Lebesgue norms") {
    const TorusGrid g(2, 64);
    Rng rng(2);
    const GridField rho = random_density(g, 4, 0.5, 2.0, rng);
    const VelocityField u = random_velocity(g, 4, rng);
    for (SchemeKind k : kBoth) {
      const GridField out = evolve(rho, [&](const GridField&, double) { return u; }, 1.0, {k, 0.0, 0.5}).rho;
      CHECK(std::abs(out.mean() - rho.mean()) <= 1e-12 * rho.mean());
      for (double q : {1.2, 1.5, 2.0, 4.0}) {
        const double drift = std::abs(lebesgue_norm(out, q) - lebesgue_norm(rho, q)) / lebesgue_norm(rho, q);
        CHECK(drift <= 1e-3);
      }
    }
  }

  TEST_CASE("time reversal") {
    const TorusGrid g(2, 128);
    Rng rng(3);
    const GridField rho = random_density(g, 4, 0.5, 2.0, rng);
    const VelocityField u = random_velocity(g, 4, rng);
    const VelocityField back = -1.0 * u;
    for (SchemeKind k : kBoth) {
      const AdvectionScheme s{k, 0.0, 0.5};
      const GridField there = evolve(rho, [&](const GridField&, double) { return u; }, 0.5, s).rho;
      const GridField again = evolve(there, [&](const GridField&, double) { return back; }, 0.5, s).rho;
      CHECK(relative_l2(again, rho) <= 1e-4);
    }
  }

  TEST_CASE("semi-Lagrangian min/max principle") {
    const TorusGrid g(2, 128);
    Rng rng(4);
    const GridField rho = random_density(g, 6, 0.5, 2.0, rng);
    const VelocityField u = random_velocity(g, 4, rng);
    const GridField out =
        evolve(rho, [&](const GridField&, double) { return u; }, 1.0, {SchemeKind::semi_lagrangian, 0.0, 0.5}).rho;
    const double slack = 1e-3 * (rho.max() - rho.min());
    CHECK(out.min() >= rho.min() - slack);
    CHECK(out.max() <= rho.max() + slack);
  }

  TEST_CASE("CFL control") {
    const TorusGrid g(2, 16);
    Rng rng(5);
    const GridField rho = random_density(g, 3, 0.5, 2.0, rng);
    const VelocityField u = random_velocity(g, 3, rng);
    // one oversize step equals the substeps it is split into
    const double h = g.spacing();
    const double dt = 4.0 * h / max_speed(u);
    const GridField split = advect_step(rho, u, {SchemeKind::spectral_rk4, dt, 0.5});
    const GridField manual = repeat_steps(rho, u, {SchemeKind::spectral_rk4, dt / 8.0, 0.5}, 8);
    CHECK(max_abs_diff(split, manual) <= 1e-13);

    const VelocityField wild = 1e13 * u;
    try {
      advect_step(rho, wild, {SchemeKind::spectral_rk4, 1.0, 0.5});
      FAIL("expected CflViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CflViolation);
    }
    CHECK_THROWS_AS(advect_step(rho, u, {SchemeKind::spectral_rk4, 0.1, 0.0}), Error);
  }

  TEST_CASE("admissible renormalisations") {
    const AdmissibleEta clamp = AdmissibleEta::smooth_clamp(2.0);
    CHECK(clamp.is_admissible());
    CHECK(clamp.bound() == 3.0);
    for (double r : {-2.0, -0.3, 0.0, 1.7, 2.0}) CHECK(clamp(r) == r);
    for (double r : {-1e6, -5.0, 2.5, 40.0, 1e6}) {
      CHECK(std::abs(clamp(r)) <= 3.0);
      CHECK(clamp.derivative(r) > 0.0);
      CHECK(clamp.derivative(r) <= 1.0);
    }
    const AdmissibleEta at = AdmissibleEta::atan_scaled(0.5);
    CHECK(at.is_admissible());
    CHECK(at(1e9) <= at.bound());
    const AdmissibleEta identity =
        AdmissibleEta::custom([](double r) { return r; }, [](double) { return 1.0; }, 10.0);
    CHECK_FALSE(identity.is_admissible());
    CHECK_THROWS_AS(AdmissibleEta::smooth_clamp(0.0), Error);

    const TorusGrid g(2, 16);
    Rng rng(6);
    const GridField rho = random_density(g, 3, -1.5, 1.5, rng);
    CHECK(renormalize(rho, AdmissibleEta::smooth_clamp(1.6)).values == rho.values);
    const GridField squashed = renormalize(rho, AdmissibleEta::smooth_clamp(0.5));
    CHECK(testing_util::max_abs(squashed) <= 1.5);
  }

  TEST_CASE("semi-Lagrangian renormalisation commutes under refinement") {
    std::vector<double> gaps;
    for (int n : {64, 128, 256, 512}) {
      const TorusGrid g(2, n);
      Rng rng(7);
      const GridField rho = random_density(g, 3, 0.5, 2.0, rng);
      const VelocityField u = random_velocity(g, 3, rng);
      const AdmissibleEta eta = AdmissibleEta::atan_scaled(1.0);
      const AdvectionScheme s{SchemeKind::semi_lagrangian, 0.2 * g.spacing() / max_speed(u), 1.0};
      const GridField a = renormalize(repeat_steps(rho, u, s, 10), eta);
      const GridField b = repeat_steps(renormalize(rho, eta), u, s, 10);
      gaps.push_back(l1_distance(a, b));
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] <= 0.5 * gaps[i - 1]);
    CHECK(gaps.back() <= 1e-6);
  }

  TEST_CASE("commutator residual") {
    const TorusGrid g(2, 32);
    Rng rng(8);
    const VelocityField u = random_velocity(g, 4, rng);
    const double h = g.spacing();
    CHECK(commutator_residual(GridField(g, 1.7), u, 2.0 * h, 2.0) <= 1e-12);
    const double c[] = {0.4, -0.9};
    const GridField rho = random_density(g, 4, 0.5, 2.0, rng);
    CHECK(commutator_residual(rho, VelocityField::uniform_translation(g, c), 2.0 * h, 1.5) <= 1e-12);
    try {
      commutator_residual(rho, u, h, 2.0);
      FAIL("expected UnresolvableMollifier");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnresolvableMollifier);
    }
    CHECK(commutator_residual(rho, u, 1.01 * h, 2.0) > 0.0);
  }

  TEST_CASE("commutator shrinks along the width ladder") {
    const TorusGrid g(2, 128);
    Rng rng(9);
    const GridField rho = random_density(g, 2, 0.5, 2.0, rng);
    const VelocityField u = random_velocity(g, 2, rng);
    double prev = INFINITY;
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
      const double r = commutator_residual(rho, u, eps, 2.0);
      CHECK(r < prev);
      prev = r;
    }
  }
}
