#pragma once

// Divergence-form advection d_t rho + div(rho u) = 0 with a frozen
// divergence-free velocity per step, renormalisation maps and the
// mollifier commutator diagnostic.

#include <functional>
#include <string>
#include <vector>

#include "nnst/field.hpp"

namespace nnst {

enum class SchemeKind {
  spectral_rk4,     ///< pseudo-spectral flux, 3/2-padded products, classical RK4
  semi_lagrangian,  ///< midpoint backward characteristics, cubic interpolation
};

SchemeKind parse_scheme_kind(const std::string& s);
std::string to_string(SchemeKind k);

struct AdvectionScheme {
  SchemeKind kind = SchemeKind::spectral_rk4;
  double dt = 0.0;          ///< requested step (<= 0: CFL only, evolve)
  double cfl_target = 0.5;  ///< in (0, 1]
};

/// Grid maximum of |u|.
double max_speed(const VelocityField& u);

/// One step of length scheme.dt. The step is split into 2^m equal sub-steps
/// when dt exceeds cfl_target * h / max|u|; throws CflViolation if a
/// sub-step would fall below 1e-12.
GridField advect_step(const GridField& rho, const VelocityField& u, const AdvectionScheme& scheme);

using VelocityProvider = std::function<VelocityField(const GridField& rho, double t)>;
using Observer = std::function<void(double t, const GridField& rho, const VelocityField& u)>;

struct EvolveResult {
  GridField rho;
  std::vector<double> times;  ///< time after each step
};

/// Steps to time T with dt = min(scheme.dt, cfl h / max|u|, T - t); the
/// provider is queried once per step and observers run after every step.
EvolveResult evolve(const GridField& rho0, const VelocityProvider& velocity, double T, const AdvectionScheme& scheme,
                    const std::vector<Observer>& observers = {});

/// Bounded, strictly increasing eta used to renormalise transport solutions.
class AdmissibleEta {
 public:
  enum class Kind { smooth_clamp, atan_scaled, custom };

  /// eta_k(r) = r on [-k, k], sign(r)(k + s/(1+s)) with s = |r| - k beyond.
  static AdmissibleEta smooth_clamp(double k);
  /// a * atan(r / a).
  static AdmissibleEta atan_scaled(double a);
  static AdmissibleEta custom(std::function<double(double)> eta, std::function<double(double)> derivative,
                              double bound);

  Kind kind() const noexcept { return kind_; }
  double operator()(double r) const;
  double derivative(double r) const;
  /// sup |eta|
  double bound() const noexcept { return bound_; }

  /// eta' > 0 and |eta| <= bound on a symmetric log grid up to 1e6.
  bool is_admissible() const;

 private:
  Kind kind_ = Kind::atan_scaled;
  double param_ = 1.0;
  double bound_ = 0.0;
  std::function<double(double)> eta_;
  std::function<double(double)> deta_;
};

GridField renormalize(const GridField& rho, const AdmissibleEta& eta);

/// || div((psi_eps * rho) u) - psi_eps * div(rho u) ||_{L^alpha} with a
/// periodic Gaussian mollifier of standard deviation eps. Throws
/// UnresolvableMollifier when eps <= h.
double commutator_residual(const GridField& rho, const VelocityField& u, double epsilon, double alpha);

/// Spectral Gaussian mollification exp(-eps^2 |k|^2 / 2).
SpectralField mollify(const SpectralField& F, double epsilon);

/// -div(rho u) computed with 3/2 zero-padded products.
SpectralField flux_divergence(const SpectralField& rho_hat, const VelocityField& u);

}  // namespace nnst
