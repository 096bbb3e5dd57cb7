#include "nnst/random_fields.hpp"

#include <cmath>

#include "nnst/fft.hpp"
#include "nnst/spectral.hpp"

namespace nnst {

SpectralField random_band_limited(const TorusGrid& g, double kmax, Rng& rng) {
  std::normal_distribution<double> normal;
  SpectralField F(g);
  const auto modes = g.modes();
  const double k2max = kmax * kmax;
  for (std::size_t i = 1; i < modes.size(); ++i) {
    if (!modes[i].resolved || modes[i].k2 > k2max || modes[i].mirror < i) continue;
    F.coeffs[i] = Complex(normal(rng), normal(rng));
    F.coeffs[modes[i].mirror] = std::conj(F.coeffs[i]);
  }
  return F;
}

GridField random_density(const TorusGrid& g, double kmax, double lo, double hi, Rng& rng) {
  GridField f = fft::to_grid_unchecked(random_band_limited(g, kmax, rng));
  const double fmin = f.min();
  const double fmax = f.max();
  const double scale = fmax > fmin ? (hi - lo) / (fmax - fmin) : 0.0;
  for (double& v : f.values) v = lo + (v - fmin) * scale;
  return f;
}

GridField rough_field(const TorusGrid& g, double exponent, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  SpectralField F(g);
  const auto modes = g.modes();
  for (std::size_t i = 1; i < modes.size(); ++i) {
    if (!modes[i].resolved || modes[i].mirror < i) continue;
    F.coeffs[i] = std::polar(std::pow(modes[i].k2, -0.5 * exponent), phase(rng));
    F.coeffs[modes[i].mirror] = std::conj(F.coeffs[i]);
  }
  GridField f = fft::to_grid_unchecked(F);
  const double m = std::max(std::abs(f.min()), std::abs(f.max()));
  for (double& v : f.values) v /= m;
  return f;
}

VelocityField random_velocity(const TorusGrid& g, double kmax, Rng& rng) {
  VelocityField raw = VelocityField::zero(g);
  for (auto& c : raw.components) c = random_band_limited(g, kmax, rng);
  VelocityField u = leray_project(raw);
  const double norm = l2_norm(u);
  if (norm > 0.0) u *= 1.0 / norm;
  return u;
}

}  // namespace nnst
