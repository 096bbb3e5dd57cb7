#include "nnst/transport.hpp"

#include <algorithm>
#include <cmath>

#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/kernels.hpp"
#include "nnst/spectral.hpp"

namespace nnst {

SchemeKind parse_scheme_kind(const std::string& s) {
  if (s == "spectral_rk4") return SchemeKind::spectral_rk4;
  if (s == "semi_lagrangian") return SchemeKind::semi_lagrangian;
  fail(ErrorKind::BadValue, "unknown advection scheme '" + s + "'");
}

std::string to_string(SchemeKind k) {
  return k == SchemeKind::spectral_rk4 ? "spectral_rk4" : "semi_lagrangian";
}

namespace {

constexpr Complex kI{0.0, 1.0};

int padded_size(int n) { return 3 * n / 2; }

std::size_t padded_index(const Mode& m, int d, int M) {
  std::size_t flat = 0;
  for (int a = 0; a < d; ++a) {
    int i = m.k[a] % M;
    if (i < 0) i += M;
    flat = flat * M + static_cast<std::size_t>(i);
  }
  return flat;
}

std::size_t ipow(int n, int d) {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

/// Values of F on the 3/2-refined grid (Nyquist modes dropped).
std::vector<double> to_padded_grid(const SpectralField& F) {
  const TorusGrid& g = F.grid;
  const int d = g.dim();
  const int M = padded_size(g.n());
  std::vector<Complex> spec(ipow(M, d));
  const auto modes = g.modes();
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].resolved) spec[padded_index(modes[i], d, M)] = F.coeffs[i];
  std::vector<Complex> vals(spec.size());
  fft::backward(d, M, spec, vals);
  std::vector<double> out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i].real();
  return out;
}

/// Coefficients on the n-lattice of a real function sampled on the 3/2 grid.
SpectralField from_padded_grid(const TorusGrid& g, std::span<const double> values) {
  const int d = g.dim();
  const int M = padded_size(g.n());
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> spec(in.size());
  fft::forward(d, M, in, spec);
  const double scale = 1.0 / static_cast<double>(in.size());
  SpectralField out(g);
  const auto modes = g.modes();
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].resolved) out.coeffs[i] = scale * spec[padded_index(modes[i], d, M)];
  return out;
}

struct PaddedVelocity {
  std::vector<std::vector<double>> comps;
};

PaddedVelocity pad_velocity(const VelocityField& u) {
  PaddedVelocity pv;
  for (const auto& c : u.components) pv.comps.push_back(to_padded_grid(c));
  return pv;
}

SpectralField flux_divergence_padded(const SpectralField& rho_hat, const PaddedVelocity& pu) {
  const TorusGrid& g = rho_hat.grid;
  const std::vector<double> rho = to_padded_grid(rho_hat);
  SpectralField out(g);
  std::vector<double> prod(rho.size());
  const auto modes = g.modes();
  for (int a = 0; a < g.dim(); ++a) {
    const auto& ua = pu.comps[a];
    for (std::size_t i = 0; i < rho.size(); ++i) prod[i] = rho[i] * ua[i];
    const SpectralField flux = from_padded_grid(g, prod);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double k = modes[i].resolved ? static_cast<double>(modes[i].k[a]) : 0.0;
      out.coeffs[i] -= kI * k * flux.coeffs[i];
    }
  }
  return out;
}

SpectralField rk4_step(const SpectralField& rho_hat, const PaddedVelocity& pu, double dt) {
  auto axpy = [](const SpectralField& x, double s, const SpectralField& y) {
    SpectralField r = x;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += s * y.coeffs[i];
    return r;
  };
  const SpectralField k1 = flux_divergence_padded(rho_hat, pu);
  const SpectralField k2 = flux_divergence_padded(axpy(rho_hat, 0.5 * dt, k1), pu);
  const SpectralField k3 = flux_divergence_padded(axpy(rho_hat, 0.5 * dt, k2), pu);
  const SpectralField k4 = flux_divergence_padded(axpy(rho_hat, dt, k3), pu);
  SpectralField out = rho_hat;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i)
    out.coeffs[i] += dt / 6.0 * (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] + k4.coeffs[i]);
  return out;
}

std::vector<GridField> velocity_on_grid(const VelocityField& u) {
  std::vector<GridField> out;
  for (const auto& c : u.components) out.push_back(fft::to_grid_unchecked(c));
  return out;
}

double max_speed_grid(const std::vector<GridField>& ug) {
  const std::size_t n = ug.front().values.size();
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& c : ug) s += c.values[i] * c.values[i];
    m2 = std::max(m2, s);
  }
  return std::sqrt(m2);
}

}  // namespace

double max_speed(const VelocityField& u) { return max_speed_grid(velocity_on_grid(u)); }

SpectralField flux_divergence(const SpectralField& rho_hat, const VelocityField& u) {
  return flux_divergence_padded(rho_hat, pad_velocity(u));
}

GridField advect_step(const GridField& rho, const VelocityField& u, const AdvectionScheme& scheme) {
  if (!(scheme.dt >= 0.0)) fail(ErrorKind::InvalidArgument, "time step must be >= 0");
  if (!(scheme.cfl_target > 0.0 && scheme.cfl_target <= 1.0))
    fail(ErrorKind::InvalidArgument, "cfl_target must lie in (0, 1]");
  if (u.grid() != rho.grid) fail(ErrorKind::InvalidArgument, "velocity and density grids differ");
  if (scheme.dt == 0.0) return rho;

  const std::vector<GridField> ug = velocity_on_grid(u);
  const double umax = max_speed_grid(ug);
  if (umax == 0.0) return rho;

  const double limit = scheme.cfl_target * rho.grid.spacing() / umax;
  int substeps = 1;
  double dt = scheme.dt;
  while (dt > limit) {
    dt *= 0.5;
    substeps *= 2;
    if (dt < 1e-12) fail(ErrorKind::CflViolation, "CFL reduction drove the step below 1e-12");
  }

  if (scheme.kind == SchemeKind::spectral_rk4) {
    const PaddedVelocity pu = pad_velocity(u);
    SpectralField rho_hat = to_spectral(rho);
    for (int s = 0; s < substeps; ++s) rho_hat = rk4_step(rho_hat, pu, dt);
    return fft::to_grid_unchecked(rho_hat);
  }

  const TorusGrid& g = rho.grid;
  std::vector<std::span<const double>> vel;
  for (const auto& c : ug) vel.emplace_back(c.values);
  const double mass = rho.mean();
  GridField cur = rho;
  GridField next(g);
  for (int s = 0; s < substeps; ++s) {
    kernels::semi_lagrangian({g.dim(), g.n(), dt, cur.values, vel}, next.values);
    // conservative correction: restore the mean removed by interpolation error
    const double shift = mass - next.mean();
    for (double& v : next.values) v += shift;
    std::swap(cur, next);
  }
  return cur;
}

EvolveResult evolve(const GridField& rho0, const VelocityProvider& velocity, double T, const AdvectionScheme& scheme,
                    const std::vector<Observer>& observers) {
  EvolveResult res{rho0, {}};
  double t = 0.0;
  const double h = rho0.grid.spacing();
  while (t < T * (1.0 - 1e-14)) {
    const VelocityField u = velocity(res.rho, t);
    const double umax = max_speed(u);
    double dt = T - t;
    if (scheme.dt > 0.0) dt = std::min(dt, scheme.dt);
    if (umax > 0.0) dt = std::min(dt, scheme.cfl_target * h / umax);
    AdvectionScheme step = scheme;
    step.dt = dt;
    res.rho = advect_step(res.rho, u, step);
    t = (T - t - dt <= 1e-14 * std::max(1.0, T)) ? T : t + dt;
    res.times.push_back(t);
    for (const auto& obs : observers) obs(t, res.rho, u);
  }
  return res;
}

// --- renormalisation -----------------------------------------------------------

AdmissibleEta AdmissibleEta::smooth_clamp(double k) {
  if (!(k > 0.0)) fail(ErrorKind::InvalidArgument, "smooth_clamp needs k > 0");
  AdmissibleEta e;
  e.kind_ = Kind::smooth_clamp;
  e.param_ = k;
  e.bound_ = k + 1.0;
  return e;
}

AdmissibleEta AdmissibleEta::atan_scaled(double a) {
  if (!(a > 0.0)) fail(ErrorKind::InvalidArgument, "atan_scaled needs a > 0");
  AdmissibleEta e;
  e.kind_ = Kind::atan_scaled;
  e.param_ = a;
  e.bound_ = a * 0.5 * M_PI;
  return e;
}

AdmissibleEta AdmissibleEta::custom(std::function<double(double)> eta, std::function<double(double)> derivative,
                                    double bound) {
  AdmissibleEta e;
  e.kind_ = Kind::custom;
  e.eta_ = std::move(eta);
  e.deta_ = std::move(derivative);
  e.bound_ = bound;
  return e;
}

double AdmissibleEta::operator()(double r) const {
  switch (kind_) {
    case Kind::smooth_clamp: {
      const double s = std::abs(r) - param_;
      if (s <= 0.0) return r;
      return std::copysign(param_ + s / (1.0 + s), r);
    }
    case Kind::atan_scaled: return param_ * std::atan(r / param_);
    case Kind::custom: return eta_(r);
  }
  return r;
}

double AdmissibleEta::derivative(double r) const {
  switch (kind_) {
    case Kind::smooth_clamp: {
      const double s = std::abs(r) - param_;
      if (s <= 0.0) return 1.0;
      return 1.0 / ((1.0 + s) * (1.0 + s));
    }
    case Kind::atan_scaled: {
      const double x = r / param_;
      return 1.0 / (1.0 + x * x);
    }
    case Kind::custom: return deta_(r);
  }
  return 1.0;
}

bool AdmissibleEta::is_admissible() const {
  std::vector<double> pts{0.0};
  for (int e = -60; e <= 60; ++e) {
    const double r = std::pow(10.0, e / 10.0);
    pts.push_back(r);
    pts.push_back(-r);
  }
  for (double r : pts) {
    if (!(derivative(r) > 0.0)) return false;
    if (!(std::abs((*this)(r)) <= bound_)) return false;
  }
  return true;
}

GridField renormalize(const GridField& rho, const AdmissibleEta& eta) {
  GridField out(rho.grid);
  std::transform(rho.values.begin(), rho.values.end(), out.values.begin(), [&eta](double r) { return eta(r); });
  return out;
}

SpectralField mollify(const SpectralField& F, double epsilon) {
  const double e2 = epsilon * epsilon;
  return apply_radial(F, [e2](double k2) { return std::exp(-0.5 * e2 * k2); });
}

double commutator_residual(const GridField& rho, const VelocityField& u, double epsilon, double alpha) {
  if (!(epsilon > rho.grid.spacing()))
    fail(ErrorKind::UnresolvableMollifier, "mollifier width must exceed the grid spacing");
  const PaddedVelocity pu = pad_velocity(u);
  const SpectralField rho_hat = to_spectral(rho);
  // flux_divergence returns -div, so the sign cancels in the difference.
  SpectralField diff = flux_divergence_padded(mollify(rho_hat, epsilon), pu);
  diff -= mollify(flux_divergence_padded(rho_hat, pu), epsilon);
  return lebesgue_norm(fft::to_grid_unchecked(diff), alpha);
}

}  // namespace nnst
