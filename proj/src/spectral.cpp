#include "nnst/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/kernels.hpp"

namespace nnst {

namespace {

constexpr Complex kI{0.0, 1.0};

/// Wavenumber used for odd derivatives: Nyquist maps to 0.
inline double derivative_wavenumber(const TorusGrid& g, const Mode& m, int axis) {
  return 2 * std::abs(m.k[axis]) == g.n() ? 0.0 : static_cast<double>(m.k[axis]);
}

}  // namespace

SpectralField partial_derivative(const SpectralField& F, int axis) {
  if (axis < 0 || axis >= F.grid.dim()) fail(ErrorKind::InvalidArgument, "derivative axis out of range");
  SpectralField out(F.grid);
  const auto modes = F.grid.modes();
  for (std::size_t i = 0; i < modes.size(); ++i)
    out.coeffs[i] = kI * derivative_wavenumber(F.grid, modes[i], axis) * F.coeffs[i];
  return out;
}

VelocityField leray_project(std::span<const SpectralField> f) {
  if (f.empty()) fail(ErrorKind::InvalidArgument, "leray_project needs at least one component");
  const TorusGrid& g = f.front().grid;
  const int d = g.dim();
  if (static_cast<int>(f.size()) != d) fail(ErrorKind::InvalidArgument, "component count does not match grid dimension");
  VelocityField u = VelocityField::zero(g);
  const auto modes = g.modes();
  for (std::size_t i = 1; i < modes.size(); ++i) {
    const Mode& m = modes[i];
    if (!m.resolved) continue;
    Complex kf = 0.0;
    for (int a = 0; a < d; ++a) kf += static_cast<double>(m.k[a]) * f[a].coeffs[i];
    const Complex s = kf / m.k2;
    for (int a = 0; a < d; ++a) u.components[a].coeffs[i] = f[a].coeffs[i] - static_cast<double>(m.k[a]) * s;
  }
  return u;
}

SymTensorField strain_tensor(const VelocityField& u) {
  const TorusGrid& g = u.grid();
  const int d = g.dim();
  SymTensorField Du(g);
  const auto modes = g.modes();
  SpectralField tmp(g);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const double ka = derivative_wavenumber(g, modes[i], a);
        const double kb = derivative_wavenumber(g, modes[i], b);
        tmp.coeffs[i] = 0.5 * kI * (ka * u.components[b].coeffs[i] + kb * u.components[a].coeffs[i]);
      }
      Du(a, b) = fft::to_grid_unchecked(tmp);
    }
  return Du;
}

VelocityField tensor_divergence(const SymTensorField& S) {
  const TorusGrid& g = S.grid;
  const int d = g.dim();
  VelocityField out = VelocityField::zero(g);
  const auto modes = g.modes();
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      const SpectralField hat = to_spectral(S(a, b));
      // S_ab contributes d_a S_ab to component b and, off the diagonal, d_b S_ab to component a.
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const double ka = derivative_wavenumber(g, modes[i], a);
        out.components[b].coeffs[i] += kI * ka * hat.coeffs[i];
        if (a != b) {
          const double kb = derivative_wavenumber(g, modes[i], b);
          out.components[a].coeffs[i] += kI * kb * hat.coeffs[i];
        }
      }
    }
  return out;
}

// --- Littlewood-Paley ------------------------------------------------------

double DyadicCutoff::chi(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto bump = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = r - 1.0;
  const double up = bump(t);
  return 1.0 - up / (up + bump(1.0 - t));
}

double DyadicCutoff::phi(double r) { return chi(0.5 * r) - chi(r); }

double DyadicCutoff::block(int j, double r) {
  if (j <= -2) return 0.0;
  if (j == -1) return chi(r);
  return phi(std::ldexp(r, -j));
}

int DyadicCutoff::max_block(int n) {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
}

SpectralField lp_block(const SpectralField& F, int j) {
  return apply_radial(F, [j](double k2) { return DyadicCutoff::block(j, std::sqrt(k2)); });
}

SpectralField low_freq_truncate(const SpectralField& F, int j) {
  return apply_radial(F, [j](double k2) { return DyadicCutoff::chi(std::ldexp(std::sqrt(k2), -j)); });
}

SpectralField sharp_truncate(const SpectralField& F, double N) {
  const double N2 = N * N;
  return apply_radial(F, [N2](double k2) { return k2 <= N2 ? 1.0 : 0.0; });
}

SpectralField box_truncate(const SpectralField& F, int kmax) {
  SpectralField out(F.grid);
  const auto modes = F.grid.modes();
  const int d = F.grid.dim();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    bool keep = true;
    for (int a = 0; a < d; ++a) keep = keep && std::abs(modes[i].k[a]) <= kmax;
    if (keep) out.coeffs[i] = F.coeffs[i];
  }
  return out;
}

int two_thirds_cutoff(int n) { return n / 3; }

// --- norms -------------------------------------------------------------------

double lebesgue_norm(const GridField& f, double r) {
  if (!(r >= 1.0)) fail(ErrorKind::InvalidArgument, "Lebesgue exponent must be >= 1");
  if (std::isinf(r)) return kernels::abs_max(f.values);
  const double s = f.grid.cell_volume() * kernels::abs_power_sum(f.values, r);
  return std::pow(s, 1.0 / r);
}

double reciprocal_norm(const GridField& rho, double sigma) {
  constexpr double kFloor = 1e-300;
  GridField inv(rho.grid);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    if (std::abs(rho.values[i]) < kFloor) return kInfinity;
    inv.values[i] = 1.0 / rho.values[i];
  }
  return lebesgue_norm(inv, sigma);
}

double besov_norm(const SpectralField& F, double s, double p, double r) {
  if (!(p >= 1.0) || !(r >= 1.0)) fail(ErrorKind::InvalidArgument, "Besov exponents must be >= 1");
  const int jmax = DyadicCutoff::max_block(F.grid.n());
  double acc = 0.0;
  for (int j = -1; j <= jmax; ++j) {
    const double term = std::exp2(j * s) * lebesgue_norm(fft::to_grid_unchecked(lp_block(F, j)), p);
    if (std::isinf(r))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, r);
  }
  return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

GridField gradient_magnitude(const SpectralField& F) {
  const TorusGrid& g = F.grid;
  GridField out(g);
  for (int a = 0; a < g.dim(); ++a) {
    const GridField da = fft::to_grid_unchecked(partial_derivative(F, a));
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] += da.values[i] * da.values[i];
  }
  for (double& v : out.values) v = std::sqrt(v);
  return out;
}

double bernstein_ratio(const SpectralField& F, int j, double p) {
  const SpectralField block = lp_block(F, j);
  const double norm = lebesgue_norm(fft::to_grid_unchecked(block), p);
  const double whole = lebesgue_norm(fft::to_grid_unchecked(F), p);
  if (norm == 0.0 || norm <= 1e-14 * whole)
    fail(ErrorKind::ZeroBlock, "Littlewood-Paley block " + std::to_string(j) + " vanishes");
  return lebesgue_norm(gradient_magnitude(block), p) / (std::exp2(j) * norm);
}

}  // namespace nnst
