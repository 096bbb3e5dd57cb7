#pragma once

// Inverse Stokes map rho -> u for
//   -div(nu(rho) |Du|^(p-2) Du) + grad pi = rho g,   div u = 0,   mean u = 0,
// computed by minimising the convex energy
//   A(u) = (1/p) int nu(rho) [(delta^2 + |Du|^2)^(p/2) - delta^p] - int rho g.u
//          (+ (1/2N) int |grad^k u|^2 with a penalty)
// over divergence-free zero-mean trigonometric polynomials whose modes lie in
// the 2/3-rule band of the grid. Integrals use the rectangle rule on the
// grid, so the discrete gradient below is the exact gradient of the discrete
// energy and energy balance holds to solver tolerance.

#include <limits>
#include <optional>
#include <vector>

#include "nnst/field.hpp"
#include "nnst/rheology.hpp"

namespace nnst {

struct Penalty {
  double N = 1.0;  ///< > 0; the penalty weight is 1/N
  int k = 3;       ///< derivative order, > 1 + d/2
};

struct StokesProblem {
  GridField rho;
  FluidParams params;
  ViscosityLaw law;
  std::optional<Penalty> penalty;

  void validate() const;
};

struct SolverOptions {
  double rel_tol = 1e-8;  ///< stop when ||grad|| <= rel_tol (1 + |A|)
  int max_iterations = 10000;
  std::optional<VelocityField> initial_guess;
  /// delta values used when p < 2 and delta = 0 is requested.
  std::vector<double> delta_ladder{1e-1, 1e-2, 1e-3, 1e-4};
};

struct StokesReport {
  int iterations = 0;
  double functional_value = 0.0;
  double gradient_norm = 0.0;
  double tolerance = 0.0;
  /// energy_balance_residual evaluated with effective_delta.
  double energy_residual = 0.0;
  std::vector<double> delta_schedule;
  double effective_delta = 0.0;
  bool converged = false;
  /// false if some accepted step increased A beyond round-off.
  bool monotone_descent = true;
  /// ||u||_{H^k} / (sqrt(N) ||rho||_{L^2}); NaN without a penalty.
  double hk_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct StokesSolution {
  VelocityField velocity;
  StokesReport report;
};

/// Discrete energy of one problem at a fixed delta. Precomputes nu(rho) and
/// the projected forcing; evaluation is const and thread-safe.
class StokesOperator {
 public:
  StokesOperator(const StokesProblem& prob, double delta);

  struct Evaluation {
    double value = 0.0;
    VelocityField gradient;
  };

  const TorusGrid& grid() const { return grid_; }
  int band() const { return kmax_; }
  double delta() const { return delta_; }
  const GridField& viscosity() const { return nu_; }

  double value(const VelocityField& u) const;
  Evaluation evaluate(const VelocityField& u) const;

  /// Orthogonal projection onto the search space (band + Leray).
  VelocityField restrict_to_space(const VelocityField& f) const;
  /// Inverse of the linear (Newtonian + penalty) multiplier |k|^2/2 + |k|^2k/N.
  VelocityField precondition(const VelocityField& g) const;
  /// The projected forcing P(rho g).
  const VelocityField& forcing() const { return forcing_; }

  double work(const VelocityField& u) const;
  /// int stress : Du plus the penalty dissipation (1/N) int |grad^k u|^2.
  double dissipation(const VelocityField& u) const;
  double penalty_energy(const VelocityField& u) const;

 private:
  TorusGrid grid_;
  FluidParams params_;
  std::optional<Penalty> penalty_;
  double delta_;
  int kmax_;
  GridField nu_;
  VelocityField forcing_;
};

double functional_value(const StokesProblem& prob, const VelocityField& u);
/// Throws InvalidArgument when delta = 0 and p < 2.
VelocityField functional_gradient(const StokesProblem& prob, const VelocityField& u);

/// Minimiser of the Newtonian (p = 2, nu = 1) energy with the same forcing
/// and penalty: the solver's initial guess.
VelocityField newtonian_solve(const StokesProblem& prob);

/// Throws DegenerateViscosity when nu(rho) vanishes on the whole grid and no
/// penalty is set. Non-convergence is reported, not thrown.
StokesSolution solve_stokes(const StokesProblem& prob, const SolverOptions& options = {});
/// As solve_stokes; requires prob.penalty.
StokesSolution solve_stokes_penalized(const StokesProblem& prob, const SolverOptions& options = {});

/// |D - W| / max(1, |W|) with D = int nu |Du|^p (regularised by prob's delta,
/// plus penalty dissipation) and W = int rho g.u.
double energy_balance_residual(const StokesProblem& prob, const VelocityField& u);

struct AprioriBound {
  double lhs = 0.0;       ///< ||Du||_{L^beta}
  double rhs_core = 0.0;  ///< ||1/rho||_{L^sigma}^(gamma/(p-1)) ||rho||_{L^q}^(1/(p-1))
  bool vacuous = false;   ///< rhs_core is infinite
};

AprioriBound apriori_check(const StokesProblem& prob, const VelocityField& u);

struct MonotonicityGap {
  double gap = 0.0;    ///< int nu (S(Du) - S(Dphi)) : (Du - Dphi)
  double scale = 0.0;  ///< int nu (S(Du):Du + S(Dphi):Dphi)
};

MonotonicityGap monotonicity_gap(const StokesProblem& prob, const VelocityField& u, const VelocityField& phi);

/// pairings[t][i] = <Psi(rho_i) - Psi(rho_limit), tests[t]>. `prob` supplies
/// everything but the density. Throws MaxIterations if a solve fails.
std::vector<std::vector<double>> minty_sweep(const StokesProblem& prob, const std::vector<GridField>& rho_sequence,
                                             const GridField& rho_limit, const std::vector<VelocityField>& tests,
                                             const SolverOptions& options = {});

/// Zero-mean pi with grad pi = rho g + div S restricted to non-solenoidal modes.
SpectralField recover_pressure(const StokesProblem& prob, const VelocityField& u);
/// || -div S + grad pi - rho g || on the velocity band, after Leray projection
/// of the residual (i.e. the part the pressure cannot absorb).
double pressure_residual(const StokesProblem& prob, const VelocityField& u, const SpectralField& pi);

}  // namespace nnst
