#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nnst/error.hpp"
#include "nnst/rheology.hpp"

using namespace nnst;
using testing_util::max_abs;
using testing_util::max_abs_diff;

namespace {

SymTensorField random_strain(const TorusGrid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  SymTensorField D(g);
  for (auto& c : D.packed)
    for (double& v : c.values) v = normal(rng);
  return D;
}

FluidParams params_with(double p, double delta = 0.0) {
  FluidParams fp = FluidParams::newtonian(2);
  fp.p = p;
  fp.delta = delta;
  return fp;
}

// Full 2x2 matrix at node i.
std::array<std::array<double, 2>, 2> at(const SymTensorField& T, std::size_t i) {
  return {{{T(0, 0).values[i], T(0, 1).values[i]}, {T(0, 1).values[i], T(1, 1).values[i]}}};
}

}  // namespace

TEST_SUITE("rheology") {
  TEST_CASE("fluid parameter validation") {
    FluidParams fp = FluidParams::newtonian(2);
    CHECK_NOTHROW(fp.validate());
    CHECK(fp.beta() == doctest::Approx(2.0));

    fp.gamma = 2.0;
    fp.sigma = 4.0;
    fp.p = 3.0;
    CHECK(fp.beta() == doctest::Approx(2.0));
    CHECK(fp.gamma_bar() == 1.0);
    fp.gamma = 0.4;
    CHECK(fp.gamma_bar() == doctest::Approx(0.4));

    for (auto mutate : std::initializer_list<void (*)(FluidParams&)>{
             [](FluidParams& f) { f.p = 1.0; }, [](FluidParams& f) { f.q = 2.0; },
             [](FluidParams& f) { f.q = 1.0; }, [](FluidParams& f) { f.nu_star = 0.0; },
             [](FluidParams& f) { f.nu_max = 0.5; }, [](FluidParams& f) { f.delta = -1.0; },
             [](FluidParams& f) { f.sigma = 0.5; }, [](FluidParams& f) { f.g = {0.0}; }}) {
      FluidParams bad = FluidParams::newtonian(2);
      mutate(bad);
      CHECK_THROWS_AS(bad.validate(), Error);
    }
    // beta <= 1: gamma / sigma too large for p
    FluidParams heavy = FluidParams::newtonian(2);
    heavy.p = 1.5;
    heavy.gamma = 1.0;
    heavy.sigma = 1.0;
    CHECK_THROWS_AS(heavy.validate(), Error);
  }

  TEST_CASE("viscosity laws") {
    const TorusGrid g(2, 8);
    const GridField rho = GridField::from_function(g, [](auto& x) { return std::sin(x[0]) * 3.0; });

    const GridField c = viscosity_eval(ViscosityLaw::constant(2.5), rho);
    CHECK(c.min() == 2.5);
    CHECK(c.max() == 2.5);

    CHECK(max_abs(viscosity_eval(ViscosityLaw::bounded_power(1.0, 1.0, 5.0), GridField(g, 0.0))) == 0.0);
    CHECK(ViscosityLaw::power(1.0, 1.0)(0.5) == 0.5);
    CHECK(ViscosityLaw::bounded_power(1.0, 1.0, 5.0)(-0.5) == 0.5);
    CHECK(ViscosityLaw::bounded_power(1.0, 2.0, 5.0)(10.0) == 5.0);
    CHECK(std::isinf(ViscosityLaw::power(1.0, 1.0).upper_bound()));

    const ViscosityLaw bp = ViscosityLaw::bounded_power(0.5, 1.5, 2.0);
    const GridField v = viscosity_eval(bp, rho);
    CHECK(v.min() >= 0.0);
    CHECK(v.max() <= 2.0);

    const ViscosityLaw table = ViscosityLaw::user_table({{0.0, 0.0}, {1.0, 1.0}, {2.0, 3.0}});
    CHECK(table(0.5) == doctest::Approx(0.5));
    CHECK(table(1.5) == doctest::Approx(2.0));
    CHECK(table(-1.5) == doctest::Approx(2.0));
    CHECK(table(9.0) == 3.0);
    CHECK(table.upper_bound() == 3.0);
    CHECK_THROWS_AS(ViscosityLaw::user_table({{0.5, 1.0}, {1.0, 2.0}}), Error);
    CHECK_THROWS_AS(ViscosityLaw::user_table({{0.0, 1.0}, {0.0, 2.0}}), Error);
    CHECK_THROWS_AS(ViscosityLaw::user_table({{0.0, -1.0}, {1.0, 2.0}}), Error);
    CHECK_THROWS_AS(ViscosityLaw::constant(-1.0), Error);
  }

  TEST_CASE("lower bound and Holder continuity") {
    CHECK(satisfies_lower_bound(ViscosityLaw::bounded_power(1.0, 1.0, 2.0), 1.0, 1.0));
    CHECK(satisfies_lower_bound(ViscosityLaw::constant(1.0), 1.0, 0.0));
    CHECK_FALSE(satisfies_lower_bound(ViscosityLaw::bounded_power(0.5, 1.0, 2.0), 1.0, 1.0));
    CHECK_FALSE(satisfies_lower_bound(ViscosityLaw::bounded_power(1.0, 2.0, 2.0), 1.0, 1.0));

    // |r|^{1/2} is 1/2-Holder with constant 1 on the positive axis.
    const double H = holder_constant(ViscosityLaw::power(1.0, 0.5), 0.5);
    CHECK(H <= 1.0 + 1e-12);
    CHECK(H >= 0.9);
    // Lipschitz constant of min(4, 2r) is 2.
    CHECK(holder_constant(ViscosityLaw::bounded_power(2.0, 1.0, 4.0), 1.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(holder_constant(ViscosityLaw::constant(3.0), 1.0) == 0.0);
  }

  TEST_CASE("stress examples") {
    const TorusGrid g(2, 8);
    std::mt19937_64 rng(1);
    const GridField rho(g, 1.0);
    const ViscosityLaw unit = ViscosityLaw::constant(1.0);

    const SymTensorField zero(g);
    for (double p : {2.0, 3.0, 4.0})
      for (const auto& c : stress(unit, params_with(p), rho, zero).packed) CHECK(max_abs(c) == 0.0);

    // p = 2: nu * Du for every delta
    const SymTensorField D = random_strain(g, rng);
    const ViscosityLaw two = ViscosityLaw::constant(2.0);
    for (double delta : {0.0, 0.3, 5.0}) {
      const SymTensorField S = stress(two, params_with(2.0, delta), rho, D);
      for (int c = 0; c < 3; ++c) {
        GridField expect = D.packed[c];
        for (double& v : expect.values) v *= 2.0;
        CHECK(max_abs_diff(S.packed[c], expect) == 0.0);
      }
    }

    // p = 3, |Du| = 2 gives 2 Du
    SymTensorField F(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      F(0, 0).values[i] = std::sqrt(2.0);
      F(1, 1).values[i] = -std::sqrt(2.0);
    }
    CHECK(F.frobenius().min() == doctest::Approx(2.0));
    const SymTensorField S3 = stress(unit, params_with(3.0), rho, F);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(S3(0, 0).values[i] == doctest::Approx(2.0 * std::sqrt(2.0)));
      CHECK(S3(1, 1).values[i] == doctest::Approx(-2.0 * std::sqrt(2.0)));
      CHECK(S3(0, 1).values[i] == 0.0);
    }
  }

  TEST_CASE("dissipation density") {
    const TorusGrid g(2, 8);
    std::mt19937_64 rng(2);
    const GridField rho = GridField::from_function(g, [](auto& x) { return 1.5 + std::cos(x[1]); });
    const ViscosityLaw law = ViscosityLaw::bounded_power(1.0, 1.0, 3.0);

    CHECK(max_abs(dissipation_density(law, params_with(3.0), rho, SymTensorField(g))) == 0.0);

    const SymTensorField D = random_strain(g, rng);
    const GridField nu = viscosity_eval(law, rho);
    const GridField frob = D.frobenius();
    const GridField d2 = dissipation_density(law, params_with(2.0), rho, D);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(d2.values[i] == doctest::Approx(nu.values[i] * frob.values[i] * frob.values[i]).epsilon(1e-13));

    for (double p : {1.5, 2.0, 3.0, 4.0})
      for (double delta : {0.0, 0.1}) {
        const FluidParams fp = params_with(p, delta);
        const SymTensorField S = stress(law, fp, rho, D);
        const GridField diss = dissipation_density(law, fp, rho, D);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const auto s = at(S, i);
          const auto e = at(D, i);
          double contraction = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) contraction += s[a][b] * e[a][b];
          CHECK(std::abs(contraction - diss.values[i]) <= 1e-12 * std::max(1.0, diss.values[i]));
        }
        if (delta == 0.0)
          for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(diss.values[i] ==
                  doctest::Approx(nu.values[i] * std::pow(frob.values[i], p)).epsilon(1e-12));
      }
  }

  TEST_CASE("frame indifference of the stress magnitude") {
    const TorusGrid g(2, 8);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    const GridField rho(g, 1.0);
    const ViscosityLaw law = ViscosityLaw::constant(1.3);
    const SymTensorField D = random_strain(g, rng);

    SymTensorField R(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double th = angle(rng);
      const double c = std::cos(th), s = std::sin(th);
      const auto m = at(D, i);
      // Q m Q^T
      const double q[2][2] = {{c, -s}, {s, c}};
      double r[2][2] = {};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) r[a][b] += q[a][k] * m[k][l] * q[b][l];
      R(0, 0).values[i] = r[0][0];
      R(0, 1).values[i] = r[0][1];
      R(1, 1).values[i] = r[1][1];
    }
    for (double p : {1.5, 2.0, 3.0}) {
      const GridField a = stress(law, params_with(p, 0.05), rho, D).frobenius();
      const GridField b = stress(law, params_with(p, 0.05), rho, R).frobenius();
      CHECK(max_abs_diff(a, b) <= 1e-10);
    }
  }

  TEST_CASE("stress magnitude is nondecreasing along a ray") {
    const TorusGrid g(2, 8);
    std::mt19937_64 rng(4);
    const GridField rho(g, 1.0);
    const ViscosityLaw law = ViscosityLaw::constant(1.0);
    const SymTensorField D = random_strain(g, rng);
    for (double p : {1.0 + 1e-9, 1.5, 2.0, 3.0}) {
      GridField prev(g, 0.0);
      for (double t = 0.0; t <= 4.0; t += 0.25) {
        SymTensorField Dt = D;
        for (auto& c : Dt.packed)
          for (double& v : c.values) v *= t;
        const GridField mag = stress(law, params_with(p), rho, Dt).frobenius();
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(mag.values[i] >= prev.values[i] - 1e-14);
        prev = mag;
      }
    }
  }

  TEST_CASE("regularisation converges quadratically in delta") {
    const TorusGrid g(2, 8);
    std::mt19937_64 rng(5);
    const GridField rho(g, 1.0);
    const ViscosityLaw law = ViscosityLaw::constant(1.0);
    SymTensorField D = random_strain(g, rng);
    for (auto& c : D.packed)
      for (double& v : c.values) v += (v >= 0.0 ? 0.5 : -0.5);  // keep |Du| away from 0
    for (double p : {3.0, 4.0}) {
      const SymTensorField exact = stress(law, params_with(p), rho, D);
      std::vector<double> errs;
      for (double delta = 0.1; delta > 0.005; delta /= 2.0) {
        const SymTensorField S = stress(law, params_with(p, delta), rho, D);
        double e = 0.0;
        for (int c = 0; c < 3; ++c) e = std::max(e, max_abs_diff(S.packed[c], exact.packed[c]));
        errs.push_back(e);
      }
      for (std::size_t i = 1; i < errs.size(); ++i) {
        const double rate = std::log2(errs[i - 1] / errs[i]);
        CHECK(rate == doctest::Approx(2.0).epsilon(0.05));
      }
    }
  }
}
