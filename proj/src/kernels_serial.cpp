// Single-threaded reference versions of the kernels in kernels.cpp.

#include <algorithm>
#include <cmath>

#include "nnst/kernels.hpp"

namespace nnst::kernels::serial {

double abs_power_sum(std::span<const double> f, double r) {
  double s = 0.0;
  for (double v : f) s += std::pow(std::abs(v), r);
  return s;
}

double abs_max(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

void viscosity(const ViscosityLaw& law, std::span<const double> rho, std::span<double> out) {
  std::transform(rho.begin(), rho.end(), out.begin(), [&law](double r) { return law(r); });
}

double power_stress(const PowerLaw& law, std::span<const double> nu, PackedConst strain, PackedMut stress_out) {
  double energy = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double s2 = point::frobenius2(law.d, strain, i);
    energy += nu[i] * point::potential(s2, law.p, law.delta);
    if (!stress_out.empty()) {
      const double f = nu[i] * point::flux_factor(s2, law.p, law.delta);
      for (std::size_t c = 0; c < strain.size(); ++c) stress_out[c][i] = f * strain[c][i];
    }
  }
  return energy;
}

double dissipation(const PowerLaw& law, std::span<const double> nu, PackedConst strain, std::span<double> out) {
  double total = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double s2 = point::frobenius2(law.d, strain, i);
    const double v = nu[i] * point::flux_factor(s2, law.p, law.delta) * s2;
    total += v;
    if (!out.empty()) out[i] = v;
  }
  return total;
}

std::pair<double, double> monotonicity_gap(const PowerLaw& law, std::span<const double> nu, PackedConst a,
                                           PackedConst b) {
  double gap = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double a2 = point::frobenius2(law.d, a, i);
    const double b2 = point::frobenius2(law.d, b, i);
    const double fa = point::flux_factor(a2, law.p, law.delta);
    const double fb = point::flux_factor(b2, law.p, law.delta);
    double g = 0.0;
    int c = 0;
    for (int x = 0; x < law.d; ++x)
      for (int y = x; y < law.d; ++y, ++c) {
        const double w = x == y ? 1.0 : 2.0;
        g += w * (fa * a[c][i] - fb * b[c][i]) * (a[c][i] - b[c][i]);
      }
    gap += nu[i] * g;
    scale += nu[i] * (fa * a2 + fb * b2);
  }
  return {gap, scale};
}

void semi_lagrangian(const SemiLagrangianArgs& args, std::span<double> out) {
  const int d = args.d;
  const int n = args.n;
  const double shift = args.dt / (kTwoPi / n);
  for (std::size_t i = 0; i < args.rho.size(); ++i) {
    double x[3] = {0.0, 0.0, 0.0};
    std::size_t rest = i;
    for (int a = d - 1; a >= 0; --a) {
      x[a] = static_cast<double>(rest % n);
      rest /= n;
    }
    double mid[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) mid[a] = x[a] - 0.5 * shift * args.velocity[a][i];
    double dep[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) dep[a] = x[a] - shift * point::cubic_sample(d, n, args.velocity[a], mid);
    out[i] = point::cubic_sample(d, n, args.rho, dep);
  }
}

}  // namespace nnst::kernels::serial
