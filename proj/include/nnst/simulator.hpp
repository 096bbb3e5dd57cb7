#pragma once

// Coupled Stokes-transport time loop
//   v = Psi(rho),  u = S_n v,  d_t rho + div(rho u) = 0,  rho(0) = S_n rho_0,
// exponent classification and convergence sweeps in n and in the penalty N.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnst/field.hpp"
#include "nnst/rheology.hpp"
#include "nnst/stokes.hpp"
#include "nnst/transport.hpp"

namespace nnst {

enum class ExponentClass { SubCritical, Critical, Inadmissible };

std::string to_string(ExponentClass c);

struct ExponentReport {
  ExponentClass cls = ExponentClass::Inadmissible;
  double Q = 0.0;            ///< (1/p)(1 + gamma/sigma) + 1/q - 1/d
  bool q_condition = false;  ///< q >= 2d/(d+2)
};

/// SubCritical iff Q < 1; Critical iff |Q - 1| <= 1e-12 and q >= 2d/(d+2).
ExponentReport classify_exponents(const FluidParams& params);

struct InitSpec {
  /// constant [c] | sine [mean, amp, k] | stratified [mean, amp, k] |
  /// random [mean, amp, kmax] | rough [mean, amp, exponent] | snapshot (path)
  std::string kind = "constant";
  std::vector<double> params;
  std::string path;
};

struct SimulationConfig {
  TorusGrid grid{2, 64};
  FluidParams params = FluidParams::newtonian(2);
  ViscosityLaw law = ViscosityLaw::constant(1.0);
  InitSpec init;
  int smoothing_n = 7;
  AdvectionScheme scheme;
  double T_final = 1.0;
  double output_every = 1.0;
  std::optional<Penalty> penalty;
  std::uint64_t seed = 0;
  bool forced = false;
  ExponentReport exponents;
};

/// rho_0 before smoothing.
GridField initial_density(const SimulationConfig& config);
/// S_n rho_0.
GridField smoothed_initial_density(const SimulationConfig& config);

struct DiagnosticsRecord {
  double t = 0.0;
  double lq_norm = 0.0;
  double l2_norm = 0.0;
  double recip_norm = 0.0;  ///< may be +inf
  double du_beta = 0.0;
  double dissipation = 0.0;
  double work = 0.0;
  double energy_residual = 0.0;
  int iters = 0;

  friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

using DiagnosticsSeries = std::vector<DiagnosticsRecord>;

struct Snapshot {
  double time = 0.0;
  GridField rho;
};

struct RunResult {
  DiagnosticsSeries series;
  std::vector<Snapshot> snapshots;
  GridField final_rho{TorusGrid{2, 8}};
  VelocityField final_velocity;  ///< u = S_n v at the final density
  double initial_mass = 0.0;     ///< grid mean of rho(0)
  int steps = 0;
  bool aborted = false;
  std::string abort_reason;
};

/// Runs to config.T_final, recording diagnostics and a snapshot every
/// output_every (and at t = 0). Stops early with aborted = true when a
/// Stokes solve does not converge.
RunResult run(const SimulationConfig& config, const SolverOptions& options = {});

/// ||rho_n(T) - rho_{n'}(T)||_{L^q} for consecutive entries of n_list.
struct SweepTable {
  std::vector<int> n_list;
  std::vector<double> increments;
};

SweepTable convergence_sweep_n(const SimulationConfig& config, const std::vector<int>& n_list,
                               const SolverOptions& options = {});

struct PenaltySweep {
  std::vector<double> N_list;
  std::vector<double> distances;           ///< ||u_N - u_inf||_{L^2}
  std::vector<double> relative_distances;  ///< distances / ||u_inf||_{L^2}
  double reference_norm = 0.0;
};

/// Penalised solves at S_n rho_0 against the unpenalised one; uses
/// config.penalty->k (throws InvalidArgument without a penalty).
PenaltySweep penalty_sweep_N(const SimulationConfig& config, const std::vector<double>& N_list,
                             const SolverOptions& options = {});

}  // namespace nnst
