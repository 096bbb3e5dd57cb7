#pragma once

// Viscosity laws nu(rho) and the power-law viscous stress
//   S[rho, u] = nu(rho) (delta^2 + |Du|^2)^((p-2)/2) Du,
// with |Du| the Frobenius norm. delta = 0 gives the exact |Du|^(p-2) Du.

#include <string>
#include <utility>
#include <vector>

#include "nnst/field.hpp"

namespace nnst {

struct FluidParams {
  double p = 2.0;         ///< power-law exponent, > 1
  double q = 1.5;         ///< density integrability exponent, in (1, 2)
  double sigma = 1.0;     ///< reciprocal-density exponent, in [1, inf]
  double gamma = 0.0;     ///< degeneracy exponent, >= 0
  double nu_star = 1.0;   ///< lower-bound constant, > 0
  double nu_max = 1.0;    ///< upper bound of nu, >= nu_star
  std::vector<double> g;  ///< gravity, size d
  int d = 2;
  double delta = 0.0;     ///< regularisation offset, >= 0

  /// 1/beta = (1/p)(1 + gamma/sigma).
  double beta() const;
  double gamma_bar() const;
  /// Throws BadValue naming the first violated constraint.
  void validate() const;

  /// Newtonian defaults with downward gravity along the last axis.
  static FluidParams newtonian(int d);
};

enum class ViscosityKind { constant, power, bounded_power, user_table };

class ViscosityLaw {
 public:
  /// nu == value.
  static ViscosityLaw constant(double value);
  /// nu(r) = nu_star |r|^gamma, no cap.
  static ViscosityLaw power(double nu_star, double gamma);
  /// nu(r) = min(nu_max, nu_star |r|^gamma).
  static ViscosityLaw bounded_power(double nu_star, double gamma, double nu_max);
  /// Piecewise-linear in |r| through (r_i, nu_i); constant beyond the ends.
  /// Abscissae must be strictly increasing and start at 0.
  static ViscosityLaw user_table(std::vector<std::pair<double, double>> points);

  ViscosityKind kind() const noexcept { return kind_; }
  double operator()(double r) const noexcept;

  /// sup over r >= 0 of nu (inf for an uncapped power law with gamma > 0).
  double upper_bound() const noexcept;

  const std::vector<std::pair<double, double>>& table() const noexcept { return table_; }
  double nu_star() const noexcept { return a_; }
  double gamma() const noexcept { return gamma_; }
  double cap() const noexcept { return cap_; }

  std::string describe() const;

 private:
  ViscosityKind kind_ = ViscosityKind::constant;
  double a_ = 1.0;
  double gamma_ = 0.0;
  double cap_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

/// Checks nu(|r|) >= nu_star |r|^gamma on a sample of (0, 1].
bool satisfies_lower_bound(const ViscosityLaw& law, double nu_star, double gamma, int samples = 2000);

/// Smallest H with |nu(a) - nu(b)| <= H |a - b|^exponent over sampled pairs in [lo, hi].
double holder_constant(const ViscosityLaw& law, double exponent, double lo = 0.01, double hi = 10.0,
                       int samples = 400);

GridField viscosity_eval(const ViscosityLaw& law, const GridField& rho);

SymTensorField stress(const ViscosityLaw& law, const FluidParams& params, const GridField& rho,
                      const SymTensorField& Du);

/// nu(rho) (delta^2 + |Du|^2)^((p-2)/2) |Du|^2, which equals stress : Du.
GridField dissipation_density(const ViscosityLaw& law, const FluidParams& params, const GridField& rho,
                              const SymTensorField& Du);

}  // namespace nnst
