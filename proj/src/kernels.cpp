#include "nnst/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace nnst::kernels {

namespace point {

double cubic_sample(int d, int n, std::span<const double> f, const double* x) {
  int base[3] = {0, 0, 0};
  double w[3][4];
  for (int a = 0; a < d; ++a) {
    const double fl = std::floor(x[a]);
    base[a] = static_cast<int>(fl);
    cubic_weights(x[a] - fl, w[a]);
  }
  auto wrap = [n](int i) {
    i %= n;
    return i < 0 ? i + n : i;
  };
  double s = 0.0;
  if (d == 2) {
    for (int i = 0; i < 4; ++i) {
      const std::size_t row = static_cast<std::size_t>(wrap(base[0] - 1 + i)) * n;
      double r = 0.0;
      for (int j = 0; j < 4; ++j) r += w[1][j] * f[row + wrap(base[1] - 1 + j)];
      s += w[0][i] * r;
    }
  } else {
    for (int i = 0; i < 4; ++i) {
      const std::size_t plane = static_cast<std::size_t>(wrap(base[0] - 1 + i)) * n;
      double si = 0.0;
      for (int j = 0; j < 4; ++j) {
        const std::size_t row = (plane + wrap(base[1] - 1 + j)) * n;
        double r = 0.0;
        for (int k = 0; k < 4; ++k) r += w[2][k] * f[row + wrap(base[2] - 1 + k)];
        si += w[1][j] * r;
      }
      s += w[0][i] * si;
    }
  }
  return s;
}

}  // namespace point

namespace {

inline long long ssize(std::span<const double> f) { return static_cast<long long>(f.size()); }

}  // namespace

double abs_power_sum(std::span<const double> f, double r) {
  double s = 0.0;
  const long long n = ssize(f);
  if (r == 2.0) {
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (long long i = 0; i < n; ++i) s += f[i] * f[i];
  } else if (r == 1.0) {
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (long long i = 0; i < n; ++i) s += std::abs(f[i]);
  } else {
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (long long i = 0; i < n; ++i) s += std::pow(std::abs(f[i]), r);
  }
  return s;
}

double abs_max(std::span<const double> f) {
  double m = 0.0;
  const long long n = ssize(f);
#pragma omp parallel for reduction(max : m) schedule(static)
  for (long long i = 0; i < n; ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

void viscosity(const ViscosityLaw& law, std::span<const double> rho, std::span<double> out) {
  const long long n = ssize(rho);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) out[i] = law(rho[i]);
}

double power_stress(const PowerLaw& law, std::span<const double> nu, PackedConst strain, PackedMut stress_out) {
  const long long n = ssize(nu);
  const int m = static_cast<int>(strain.size());
  const bool write = !stress_out.empty();
  double energy = 0.0;
#pragma omp parallel for reduction(+ : energy) schedule(static)
  for (long long i = 0; i < n; ++i) {
    const double s2 = point::frobenius2(law.d, strain, i);
    energy += nu[i] * point::potential(s2, law.p, law.delta);
    if (write) {
      const double f = nu[i] * point::flux_factor(s2, law.p, law.delta);
      for (int c = 0; c < m; ++c) stress_out[c][i] = f * strain[c][i];
    }
  }
  return energy;
}

double dissipation(const PowerLaw& law, std::span<const double> nu, PackedConst strain, std::span<double> out) {
  const long long n = ssize(nu);
  const bool write = !out.empty();
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (long long i = 0; i < n; ++i) {
    const double s2 = point::frobenius2(law.d, strain, i);
    const double v = nu[i] * point::flux_factor(s2, law.p, law.delta) * s2;
    total += v;
    if (write) out[i] = v;
  }
  return total;
}

std::pair<double, double> monotonicity_gap(const PowerLaw& law, std::span<const double> nu, PackedConst a,
                                           PackedConst b) {
  const long long n = ssize(nu);
  const int d = law.d;
  double gap = 0.0;
  double scale = 0.0;
#pragma omp parallel for reduction(+ : gap, scale) schedule(static)
  for (long long i = 0; i < n; ++i) {
    const double a2 = point::frobenius2(d, a, i);
    const double b2 = point::frobenius2(d, b, i);
    const double fa = point::flux_factor(a2, law.p, law.delta);
    const double fb = point::flux_factor(b2, law.p, law.delta);
    double g = 0.0;
    int c = 0;
    for (int x = 0; x < d; ++x)
      for (int y = x; y < d; ++y, ++c) {
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
  const double h = kTwoPi / n;
  const double shift = args.dt / h;
  const long long size = ssize(args.rho);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < size; ++i) {
    double x[3] = {0.0, 0.0, 0.0};
    std::size_t rest = static_cast<std::size_t>(i);
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

std::vector<std::span<const double>> packed_view(const SymTensorField& t) {
  std::vector<std::span<const double>> v;
  for (const auto& f : t.packed) v.emplace_back(f.values);
  return v;
}

std::vector<std::span<double>> packed_view_mut(SymTensorField& t) {
  std::vector<std::span<double>> v;
  for (auto& f : t.packed) v.emplace_back(f.values);
  return v;
}

}  // namespace nnst::kernels
