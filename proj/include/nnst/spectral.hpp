#pragma once

// Fourier-side operators on T^d: differentiation, Leray projection, strain
// rate, Littlewood-Paley blocks, truncations and Lebesgue/Besov norms.

#include <limits>
#include <span>

#include "nnst/field.hpp"

namespace nnst {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Multiplication by i*k_axis. The Nyquist wavenumber is treated as 0 so the
/// result stays real.
SpectralField partial_derivative(const SpectralField& F, int axis);

/// Mode-wise f - k (k.f)/|k|^2. Zeroes the mean mode and every mode that
/// touches a Nyquist index.
VelocityField leray_project(std::span<const SpectralField> f);
inline VelocityField leray_project(const VelocityField& f) { return leray_project(f.components); }

/// [Du]_ij = (d_i u_j + d_j u_i) / 2 on the grid.
SymTensorField strain_tensor(const VelocityField& u);

/// Spectral divergence of a symmetric tensor: (div S)_j = sum_i d_i S_ij.
VelocityField tensor_divergence(const SymTensorField& S);

/// Radial profile of the dyadic partition of unity: chi = 1 on |x| <= 1,
/// chi = 0 on |x| >= 2, smooth and monotone in between (built from exp(-1/t)).
struct DyadicCutoff {
  static double chi(double r);
  /// phi(r) = chi(r/2) - chi(r), supported in 1 < r < 4.
  static double phi(double r);
  /// Multiplier of block j at radius r (0 for j <= -2).
  static double block(int j, double r);
  /// Index of the last block that can be nonzero on an n-point axis.
  static int max_block(int n);
};

SpectralField lp_block(const SpectralField& F, int j);
/// S_j = chi(2^-j D) = sum_{j' <= j-1} Delta_j'.
SpectralField low_freq_truncate(const SpectralField& F, int j);
/// E_N: zero every mode with |k| > N.
SpectralField sharp_truncate(const SpectralField& F, double N);
/// Zero every mode with some |k_a| > kmax (box truncation, used for the 2/3 rule).
SpectralField box_truncate(const SpectralField& F, int kmax);
/// Largest retained wavenumber per axis under the 2/3 rule.
int two_thirds_cutoff(int n);

/// (h^d sum |f|^r)^(1/r), or max |f| for r = inf. Throws for r < 1.
double lebesgue_norm(const GridField& f, double r);
/// lebesgue_norm of 1/rho; +inf when some |rho_i| < 1e-300.
double reciprocal_norm(const GridField& rho, double sigma);
/// l^r over j >= -1 of 2^(js) ||Delta_j F||_{L^p}.
double besov_norm(const SpectralField& F, double s, double p, double r);
/// ||grad Delta_j F||_{L^p} / (2^j ||Delta_j F||_{L^p}). Throws ZeroBlock.
double bernstein_ratio(const SpectralField& F, int j, double p);

/// Pointwise Euclidean norm of the gradient of a scalar field.
GridField gradient_magnitude(const SpectralField& F);

/// Multiply each mode by m(|k|^2).
template <class Multiplier>
SpectralField apply_radial(const SpectralField& F, Multiplier&& m) {
  SpectralField out(F.grid);
  const auto modes = F.grid.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) out.coeffs[i] = F.coeffs[i] * m(modes[i].k2);
  return out;
}

}  // namespace nnst
