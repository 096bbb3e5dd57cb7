#pragma once

// Pointwise and reduction kernels behind the spectral, rheology, stokes and
// transport modules. Every kernel has an OpenMP version in nnst::kernels and
// a plain-loop reference in nnst::kernels::serial with the same signature;
// tests compare the two and bench/ times them. The per-node arithmetic lives
// in nnst::kernels::point so both versions evaluate identical expressions.

#include <cmath>
#include <span>
#include <vector>

#include "nnst/rheology.hpp"

namespace nnst::kernels {

/// Packed symmetric tensor field: d(d+1)/2 arrays of equal length.
using PackedConst = std::span<const std::span<const double>>;
using PackedMut = std::span<const std::span<double>>;

/// Arguments of the power-law stress family.
struct PowerLaw {
  int d = 2;
  double p = 2.0;
  double delta = 0.0;
};

/// Periodic samples for the semi-Lagrangian step.
struct SemiLagrangianArgs {
  int d = 2;
  int n = 0;
  double dt = 0.0;
  std::span<const double> rho;
  std::span<const std::span<const double>> velocity;  ///< d arrays on the grid
};

namespace point {

/// Frobenius norm squared of a packed symmetric tensor at node i.
inline double frobenius2(int d, PackedConst t, std::size_t i) {
  double s = 0.0;
  int c = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b, ++c) {
      const double v = t[c][i];
      s += (a == b ? 1.0 : 2.0) * v * v;
    }
  return s;
}

/// (delta^2 + s2)^((p-2)/2), with the 0 * inf case at a vanishing base
/// mapped to 0 (the stress itself is continuous there for p > 1).
inline double flux_factor(double s2, double p, double delta) {
  const double base = delta * delta + s2;
  if (p == 2.0) return 1.0;
  if (base == 0.0) return 0.0;
  return std::pow(base, 0.5 * (p - 2.0));
}

/// (1/p) [(delta^2 + s2)^(p/2) - delta^p]
inline double potential(double s2, double p, double delta) {
  const double base = delta * delta + s2;
  if (p == 2.0) return 0.5 * s2;
  return (std::pow(base, 0.5 * p) - std::pow(delta, p)) / p;
}

/// Cubic Lagrange weights for fractional offset t in [0, 1) at nodes -1, 0, 1, 2.
inline void cubic_weights(double t, double w[4]) {
  w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

/// Periodic tensor-product cubic interpolation of a grid function at x
/// (grid units, any real values).
double cubic_sample(int d, int n, std::span<const double> f, const double* x);

}  // namespace point

// --- OpenMP kernels ---------------------------------------------------------

double abs_power_sum(std::span<const double> f, double r);
double abs_max(std::span<const double> f);
void viscosity(const ViscosityLaw& law, std::span<const double> rho, std::span<double> out);
/// Writes stress (if `stress_out` is non-empty) and returns sum of nu * potential.
double power_stress(const PowerLaw& law, std::span<const double> nu, PackedConst strain, PackedMut stress_out);
/// Writes nu * factor * |D|^2 per node (if `out` is non-empty) and returns the sum.
double dissipation(const PowerLaw& law, std::span<const double> nu, PackedConst strain, std::span<double> out);
/// sum of nu (S(A) - S(B)) : (A - B) together with sum of nu (|S(A):A| + |S(B):B|) as scale.
std::pair<double, double> monotonicity_gap(const PowerLaw& law, std::span<const double> nu, PackedConst a,
                                           PackedConst b);
/// Backward characteristic (midpoint rule) plus cubic interpolation.
void semi_lagrangian(const SemiLagrangianArgs& args, std::span<double> out);

namespace serial {

double abs_power_sum(std::span<const double> f, double r);
double abs_max(std::span<const double> f);
void viscosity(const ViscosityLaw& law, std::span<const double> rho, std::span<double> out);
double power_stress(const PowerLaw& law, std::span<const double> nu, PackedConst strain, PackedMut stress_out);
double dissipation(const PowerLaw& law, std::span<const double> nu, PackedConst strain, std::span<double> out);
std::pair<double, double> monotonicity_gap(const PowerLaw& law, std::span<const double> nu, PackedConst a,
                                           PackedConst b);
void semi_lagrangian(const SemiLagrangianArgs& args, std::span<double> out);

}  // namespace serial

/// Helpers to view SymTensorField / GridField storage as packed spans.
std::vector<std::span<const double>> packed_view(const SymTensorField& t);
std::vector<std::span<double>> packed_view_mut(SymTensorField& t);

}  // namespace nnst::kernels
