#include "nnst/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/io.hpp"
#include "nnst/random_fields.hpp"
#include "nnst/spectral.hpp"

namespace nnst {

std::string to_string(ExponentClass c) {
  switch (c) {
    case ExponentClass::SubCritical: return "SubCritical";
    case ExponentClass::Critical: return "Critical";
    case ExponentClass::Inadmissible: return "Inadmissible";
  }
  return "Inadmissible";
}

ExponentReport classify_exponents(const FluidParams& params) {
  ExponentReport r;
  const double d = params.d;
  const double ratio = std::isinf(params.sigma) ? 0.0 : params.gamma / params.sigma;
  r.Q = (1.0 + ratio) / params.p + 1.0 / params.q - 1.0 / d;
  r.q_condition = params.q >= 2.0 * d / (d + 2.0);
  if (r.Q < 1.0 && std::abs(r.Q - 1.0) > 1e-12)
    r.cls = ExponentClass::SubCritical;
  else if (std::abs(r.Q - 1.0) <= 1e-12 && r.q_condition)
    r.cls = ExponentClass::Critical;
  else
    r.cls = ExponentClass::Inadmissible;
  return r;
}

namespace {

void need_params(const InitSpec& init, std::size_t count) {
  if (init.params.size() != count)
    fail(ErrorKind::BadValue, "init kind '" + init.kind + "' takes " + std::to_string(count) + " parameters, got " +
                                  std::to_string(init.params.size()));
}

GridField read_snapshot_density(const std::string& path, const TorusGrid& g) {
  Snapshot snap = read_snapshot(path);
  if (snap.rho.grid != g)
    fail(ErrorKind::BadValue, "snapshot '" + path + "' is on a " + std::to_string(snap.rho.grid.dim()) + "-d grid with n = " +
                                  std::to_string(snap.rho.grid.n()) + ", which does not match the configured grid");
  return std::move(snap.rho);
}

}  // namespace

GridField initial_density(const SimulationConfig& config) {
  const TorusGrid& g = config.grid;
  const InitSpec& init = config.init;
  const int last = g.dim() - 1;
  if (init.kind == "constant") {
    need_params(init, 1);
    return GridField(g, init.params[0]);
  }
  if (init.kind == "sine" || init.kind == "stratified") {
    need_params(init, 3);
    const double mean = init.params[0];
    const double amp = init.params[1];
    const double k = init.params[2];
    const int axis = init.kind == "sine" ? 0 : last;
    return GridField::from_function(g, [=](const std::array<double, 3>& x) { return mean + amp * std::sin(k * x[axis]); });
  }
  if (init.kind == "random" || init.kind == "rough") {
    need_params(init, 3);
    Rng rng(config.seed);
    GridField shape = init.kind == "random" ? fft::to_grid_unchecked(random_band_limited(g, init.params[2], rng))
                                            : rough_field(g, init.params[2], rng);
    const double m = std::max(std::abs(shape.min()), std::abs(shape.max()));
    for (double& v : shape.values) v = init.params[0] + init.params[1] * (m > 0.0 ? v / m : 0.0);
    return shape;
  }
  if (init.kind == "snapshot") return read_snapshot_density(init.path, g);
  fail(ErrorKind::BadValue, "unknown init kind '" + init.kind + "'");
}

GridField smoothed_initial_density(const SimulationConfig& config) {
  return fft::to_grid_unchecked(low_freq_truncate(to_spectral(initial_density(config)), config.smoothing_n));
}

namespace {

VelocityField smooth_velocity(const VelocityField& v, int smoothing_n) {
  VelocityField u = v;
  for (auto& c : u.components) c = low_freq_truncate(c, smoothing_n);
  return u;
}

StokesProblem make_problem(const SimulationConfig& config, const GridField& rho) {
  return StokesProblem{rho, config.params, config.law, config.penalty};
}

DiagnosticsRecord diagnose(double t, const StokesProblem& prob, const StokesSolution& sol) {
  const FluidParams& fp = prob.params;
  DiagnosticsRecord r;
  r.t = t;
  r.lq_norm = lebesgue_norm(prob.rho, fp.q);
  r.l2_norm = lebesgue_norm(prob.rho, 2.0);
  r.recip_norm = reciprocal_norm(prob.rho, fp.sigma);
  r.du_beta = lebesgue_norm(strain_tensor(sol.velocity).frobenius(), fp.beta());
  const StokesOperator op(prob, sol.report.effective_delta);
  r.dissipation = op.dissipation(sol.velocity);
  r.work = op.work(sol.velocity);
  r.energy_residual = sol.report.energy_residual;
  r.iters = sol.report.iterations;
  return r;
}

}  // namespace

RunResult run(const SimulationConfig& config, const SolverOptions& options) {
  if (!(config.T_final > 0.0)) fail(ErrorKind::BadValue, "T must be > 0");
  if (!(config.output_every > 0.0)) fail(ErrorKind::BadValue, "output_every must be > 0");

  RunResult res;
  GridField rho = smoothed_initial_density(config);
  res.initial_mass = rho.mean();
  const double h = config.grid.spacing();
  const double T = config.T_final;
  const double t_eps = 1e-12 * std::max(1.0, T);

  SolverOptions opts = options;
  auto solve = [&](const GridField& density) {
    StokesSolution sol = solve_stokes(make_problem(config, density), opts);
    if (!sol.report.converged) {
      res.aborted = true;
      res.abort_reason = "Stokes solve did not converge after " + std::to_string(sol.report.iterations) +
                         " iterations (gradient " + std::to_string(sol.report.gradient_norm) + ")";
    }
    // Later solves start next to the previous minimiser, so only the final
    // regularisation stage is repeated.
    opts.initial_guess = sol.velocity;
    if (!sol.report.delta_schedule.empty()) opts.delta_ladder = {sol.report.delta_schedule.back()};
    return sol;
  };

  auto record = [&](double t, const GridField& density, const StokesSolution& sol) {
    res.series.push_back(diagnose(t, make_problem(config, density), sol));
    res.snapshots.push_back({t, density});
  };

  StokesSolution sol = solve(rho);
  record(0.0, rho, sol);

  double t = 0.0;
  double next_output = std::min(config.output_every, T);
  while (!res.aborted && t < T - t_eps) {
    const VelocityField u = smooth_velocity(sol.velocity, config.smoothing_n);
    const double umax = max_speed(u);
    double dt = next_output - t;
    if (umax > 0.0) dt = std::min(dt, config.scheme.cfl_target * h / umax);
    if (config.scheme.dt > 0.0) dt = std::min(dt, config.scheme.dt);

    AdvectionScheme step = config.scheme;
    step.dt = dt;
    rho = advect_step(rho, u, step);
    t = next_output - (t + dt) <= t_eps ? next_output : t + dt;
    ++res.steps;

    if (!rho.all_finite()) {
      res.aborted = true;
      res.abort_reason = "density became non-finite at t = " + std::to_string(t);
      break;
    }
    sol = solve(rho);
    if (t == next_output) {
      record(t, rho, sol);
      next_output = std::min(next_output + config.output_every, T);
      if (T - next_output <= t_eps) next_output = T;
    }
  }

  res.final_velocity = smooth_velocity(sol.velocity, config.smoothing_n);
  res.final_rho = std::move(rho);
  return res;
}

SweepTable convergence_sweep_n(const SimulationConfig& config, const std::vector<int>& n_list,
                               const SolverOptions& options) {
  SweepTable table;
  table.n_list = n_list;
  std::vector<GridField> finals;
  for (int n : n_list) {
    SimulationConfig c = config;
    c.smoothing_n = n;
    RunResult r = run(c, options);
    if (r.aborted) fail(ErrorKind::MaxIterations, "sweep member n = " + std::to_string(n) + ": " + r.abort_reason);
    finals.push_back(std::move(r.final_rho));
  }
  for (std::size_t i = 1; i < finals.size(); ++i) {
    GridField diff = finals[i];
    for (std::size_t j = 0; j < diff.values.size(); ++j) diff.values[j] -= finals[i - 1].values[j];
    table.increments.push_back(lebesgue_norm(diff, config.params.q));
  }
  return table;
}

PenaltySweep penalty_sweep_N(const SimulationConfig& config, const std::vector<double>& N_list,
                             const SolverOptions& options) {
  if (!config.penalty) fail(ErrorKind::InvalidArgument, "penalty sweep needs a configured penalty order k");
  const GridField rho = smoothed_initial_density(config);
  StokesProblem prob = make_problem(config, rho);
  prob.penalty.reset();
  const StokesSolution reference = solve_stokes(prob, options);
  if (!reference.report.converged) fail(ErrorKind::MaxIterations, "unpenalised reference solve did not converge");

  PenaltySweep out;
  out.N_list = N_list;
  out.reference_norm = l2_norm(reference.velocity);
  for (double N : N_list) {
    prob.penalty = Penalty{N, config.penalty->k};
    const StokesSolution s = solve_stokes_penalized(prob, options);
    if (!s.report.converged) fail(ErrorKind::MaxIterations, "penalised solve did not converge at N = " + std::to_string(N));
    const double dist = l2_norm(s.velocity - reference.velocity);
    out.distances.push_back(dist);
    out.relative_distances.push_back(out.reference_norm > 0.0 ? dist / out.reference_norm : dist);
  }
  return out;
}

}  // namespace nnst
