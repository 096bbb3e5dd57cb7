#include "nnst/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/kernels.hpp"
#include "nnst/spectral.hpp"

namespace nnst {

void StokesProblem::validate() const {
  params.validate();
  if (rho.grid.dim() != params.d) fail(ErrorKind::InvalidArgument, "density grid dimension differs from params.d");
  if (!rho.all_finite()) fail(ErrorKind::InvalidArgument, "density has non-finite values");
  if (penalty) {
    if (!(penalty->N > 0.0)) fail(ErrorKind::BadValue, "penalty N must be > 0");
    if (!(penalty->k > 1.0 + params.d / 2.0))
      fail(ErrorKind::BadValue, "penalty order k must exceed 1 + d/2");
  }
}

// --- StokesOperator ----------------------------------------------------------

StokesOperator::StokesOperator(const StokesProblem& prob, double delta)
    : grid_(prob.rho.grid),
      params_(prob.params),
      penalty_(prob.penalty),
      delta_(delta),
      kmax_(two_thirds_cutoff(prob.rho.grid.n())),
      nu_(viscosity_eval(prob.law, prob.rho)),
      forcing_(VelocityField::zero(prob.rho.grid)) {
  prob.validate();
  params_.delta = delta;
  const SpectralField rho_hat = to_spectral(prob.rho);
  VelocityField f = VelocityField::zero(grid_);
  for (int a = 0; a < grid_.dim(); ++a) f.components[a] = params_.g[a] * rho_hat;
  forcing_ = restrict_to_space(f);
}

VelocityField StokesOperator::restrict_to_space(const VelocityField& f) const {
  VelocityField boxed = VelocityField::zero(grid_);
  for (int a = 0; a < grid_.dim(); ++a) boxed.components[a] = box_truncate(f.components[a], kmax_);
  return leray_project(boxed);
}

double StokesOperator::penalty_energy(const VelocityField& u) const {
  if (!penalty_) return 0.0;
  const auto modes = grid_.modes();
  double s = 0.0;
  for (const auto& c : u.components)
    for (std::size_t i = 0; i < modes.size(); ++i) s += std::pow(modes[i].k2, penalty_->k) * std::norm(c.coeffs[i]);
  return 0.5 / penalty_->N * grid_.volume() * s;
}

VelocityField StokesOperator::precondition(const VelocityField& g) const {
  VelocityField out = g;
  const auto modes = grid_.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double k2 = modes[i].k2;
    double m = 0.0;
    if (k2 > 0.0) {
      double lin = 0.5 * k2;
      if (penalty_) lin += std::pow(k2, penalty_->k) / penalty_->N;
      m = 1.0 / lin;
    }
    for (auto& c : out.components) c.coeffs[i] *= m;
  }
  return out;
}

double StokesOperator::work(const VelocityField& u) const {
  // int rho g.u = <P(rho g), u> for u in the search space.
  return inner(forcing_, u);
}

double StokesOperator::value(const VelocityField& u) const {
  const SymTensorField Du = strain_tensor(u);
  const auto strain = kernels::packed_view(Du);
  const double energy = kernels::power_stress({grid_.dim(), params_.p, delta_}, nu_.values, strain, {});
  return grid_.cell_volume() * energy - work(u) + penalty_energy(u);
}

StokesOperator::Evaluation StokesOperator::evaluate(const VelocityField& u) const {
  const SymTensorField Du = strain_tensor(u);
  SymTensorField S(grid_);
  const auto strain = kernels::packed_view(Du);
  const auto stress_out = kernels::packed_view_mut(S);
  const double energy = kernels::power_stress({grid_.dim(), params_.p, delta_}, nu_.values, strain, stress_out);

  Evaluation ev;
  ev.value = grid_.cell_volume() * energy - work(u) + penalty_energy(u);

  VelocityField g = tensor_divergence(S);
  g *= -1.0;
  if (penalty_) {
    const auto modes = grid_.modes();
    for (int a = 0; a < grid_.dim(); ++a)
      for (std::size_t i = 0; i < modes.size(); ++i)
        g.components[a].coeffs[i] += std::pow(modes[i].k2, penalty_->k) / penalty_->N * u.components[a].coeffs[i];
  }
  ev.gradient = restrict_to_space(g);
  ev.gradient -= forcing_;
  return ev;
}

double StokesOperator::dissipation(const VelocityField& u) const {
  const SymTensorField Du = strain_tensor(u);
  const auto strain = kernels::packed_view(Du);
  const double d = kernels::dissipation({grid_.dim(), params_.p, delta_}, nu_.values, strain, {});
  return grid_.cell_volume() * d + 2.0 * penalty_energy(u);
}

// --- free functions ----------------------------------------------------------

double functional_value(const StokesProblem& prob, const VelocityField& u) {
  return StokesOperator(prob, prob.params.delta).value(u);
}

VelocityField functional_gradient(const StokesProblem& prob, const VelocityField& u) {
  if (prob.params.delta == 0.0 && prob.params.p < 2.0)
    fail(ErrorKind::InvalidArgument, "energy gradient is singular for delta = 0 and p < 2");
  return StokesOperator(prob, prob.params.delta).evaluate(u).gradient;
}

VelocityField newtonian_solve(const StokesProblem& prob) {
  const StokesOperator op(prob, prob.params.delta);
  return op.precondition(op.forcing());
}

double energy_balance_residual(const StokesProblem& prob, const VelocityField& u) {
  const StokesOperator op(prob, prob.params.delta);
  const double w = op.work(u);
  return std::abs(op.dissipation(u) - w) / std::max(1.0, std::abs(w));
}

namespace {

struct StageResult {
  VelocityField u;
  int iterations = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
  double tolerance = 0.0;
  bool converged = false;
  bool monotone = true;
};

// Preconditioned nonlinear conjugate gradients (Polak-Ribiere+), with a
// line search on the directional derivative. On a quadratic energy the
// secant step is exact and the iteration reduces to linear PCG.
StageResult minimise(const StokesOperator& op, VelocityField u, double rel_tol, int max_iterations) {
  StageResult res;
  auto ev = op.evaluate(u);
  VelocityField z = op.precondition(ev.gradient);
  VelocityField dir = -1.0 * z;
  double gz = inner(ev.gradient, z);
  double step = 1.0;
  double prev_slope = 0.0;

  auto done = [&](const StokesOperator::Evaluation& e) {
    return l2_norm(e.gradient) <= rel_tol * (1.0 + std::abs(e.value));
  };

  int it = 0;
  bool converged = done(ev);
  for (; !converged && it < max_iterations; ++it) {
    double slope0 = inner(ev.gradient, dir);
    if (!(slope0 < 0.0)) {
      dir = -1.0 * z;
      slope0 = -gz;
      if (!(slope0 < 0.0)) break;
    }
    if (it > 0 && prev_slope < 0.0) step = std::clamp(step * prev_slope / slope0, 1e-12, 1e12);
    const double phi0 = ev.value;
    const double slack = 1e-13 * (1.0 + std::abs(phi0));

    // Bracket and secant on phi'(t) = <grad A(u + t dir), dir>.
    double lo = 0.0, dlo = slope0;
    double hi = -1.0, dhi = 0.0;
    double t = step;
    bool accepted = false;
    StokesOperator::Evaluation trial;
    for (int ls = 0; ls < 60; ++ls) {
      VelocityField cand = u;
      cand.axpy(t, dir);
      trial = op.evaluate(cand);
      const double dt = inner(trial.gradient, dir);
      const bool small_slope = std::abs(dt) <= 0.1 * std::abs(slope0);
      if (small_slope && trial.value <= phi0 + slack) {
        u = std::move(cand);
        accepted = true;
        break;
      }
      if (dt < 0.0 && trial.value <= phi0 + slack) {
        lo = t;
        dlo = dt;
      } else {
        hi = t;
        dhi = dt;
      }
      if (hi < 0.0) {
        t *= 4.0;
        continue;
      }
      double next = (dhi != dlo) ? lo - dlo * (hi - lo) / (dhi - dlo) : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      t = next;
    }
    if (!accepted) {
      if (lo > 0.0) {
        VelocityField cand = u;
        cand.axpy(lo, dir);
        trial = op.evaluate(cand);
        u = std::move(cand);
        t = lo;
      } else {
        break;
      }
    }
    if (trial.value > phi0 + slack) res.monotone = false;
    step = t;
    prev_slope = slope0;

    VelocityField z_new = op.precondition(trial.gradient);
    const double gz_new = inner(trial.gradient, z_new);
    const double beta = std::max(0.0, (gz_new - inner(ev.gradient, z_new)) / gz);
    dir *= beta;
    dir -= z_new;
    z = std::move(z_new);
    gz = gz_new;
    ev = std::move(trial);
    converged = done(ev);
  }
  res.iterations = it;
  res.value = ev.value;
  res.gradient_norm = l2_norm(ev.gradient);
  res.tolerance = rel_tol * (1.0 + std::abs(ev.value));
  res.converged = converged;
  res.u = std::move(u);
  return res;
}

}  // namespace

StokesSolution solve_stokes(const StokesProblem& prob, const SolverOptions& options) {
  prob.validate();
  if (!prob.penalty) {
    const GridField nu = viscosity_eval(prob.law, prob.rho);
    if (nu.max() <= 0.0)
      fail(ErrorKind::DegenerateViscosity, "nu(rho) vanishes on the whole grid; use the penalised solver");
  }

  std::vector<double> ladder;
  if (prob.params.p < 2.0 && prob.params.delta == 0.0)
    ladder = options.delta_ladder;
  else
    ladder = {prob.params.delta};
  if (ladder.empty()) fail(ErrorKind::InvalidArgument, "empty delta ladder");

  VelocityField u = VelocityField::zero(prob.rho.grid);
  {
    const StokesOperator first(prob, ladder.front());
    u = options.initial_guess ? first.restrict_to_space(*options.initial_guess) : newtonian_solve(prob);
  }

  StokesSolution sol;
  StokesReport& rep = sol.report;
  rep.delta_schedule = ladder;
  StageResult stage;
  for (double delta : ladder) {
    const StokesOperator op(prob, delta);
    stage = minimise(op, std::move(u), options.rel_tol, options.max_iterations - rep.iterations);
    u = stage.u;
    rep.iterations += stage.iterations;
    rep.monotone_descent = rep.monotone_descent && stage.monotone;
  }
  rep.functional_value = stage.value;
  rep.gradient_norm = stage.gradient_norm;
  rep.tolerance = stage.tolerance;
  rep.converged = stage.converged;
  rep.effective_delta = ladder.back();

  StokesProblem eff = prob;
  eff.params.delta = rep.effective_delta;
  rep.energy_residual = energy_balance_residual(eff, u);
  if (prob.penalty) {
    const auto modes = prob.rho.grid.modes();
    double hk2 = 0.0;
    for (const auto& c : u.components)
      for (std::size_t i = 0; i < modes.size(); ++i)
        hk2 += std::pow(1.0 + modes[i].k2, prob.penalty->k) * std::norm(c.coeffs[i]);
    hk2 *= prob.rho.grid.volume();
    const double rho_l2 = lebesgue_norm(prob.rho, 2.0);
    rep.hk_ratio = rho_l2 > 0.0 ? std::sqrt(hk2) / (std::sqrt(prob.penalty->N) * rho_l2) : 0.0;
  }
  sol.velocity = std::move(u);
  return sol;
}

StokesSolution solve_stokes_penalized(const StokesProblem& prob, const SolverOptions& options) {
  if (!prob.penalty) fail(ErrorKind::InvalidArgument, "solve_stokes_penalized needs a penalty");
  return solve_stokes(prob, options);
}

AprioriBound apriori_check(const StokesProblem& prob, const VelocityField& u) {
  const FluidParams& fp = prob.params;
  AprioriBound b;
  b.lhs = lebesgue_norm(strain_tensor(u).frobenius(), fp.beta());
  const double recip = reciprocal_norm(prob.rho, fp.sigma);
  const double e1 = fp.gamma / (fp.p - 1.0);
  const double recip_term = e1 == 0.0 ? 1.0 : std::pow(recip, e1);
  b.rhs_core = recip_term * std::pow(lebesgue_norm(prob.rho, fp.q), 1.0 / (fp.p - 1.0));
  b.vacuous = std::isinf(b.rhs_core);
  return b;
}

MonotonicityGap monotonicity_gap(const StokesProblem& prob, const VelocityField& u, const VelocityField& phi) {
  const GridField nu = viscosity_eval(prob.law, prob.rho);
  const SymTensorField Du = strain_tensor(u);
  const SymTensorField Dphi = strain_tensor(phi);
  const auto [gap, scale] = kernels::monotonicity_gap({prob.params.d, prob.params.p, prob.params.delta}, nu.values,
                                                      kernels::packed_view(Du), kernels::packed_view(Dphi));
  const double h = prob.rho.grid.cell_volume();
  return {h * gap, h * scale};
}

std::vector<std::vector<double>> minty_sweep(const StokesProblem& prob, const std::vector<GridField>& rho_sequence,
                                             const GridField& rho_limit, const std::vector<VelocityField>& tests,
                                             const SolverOptions& options) {
  auto solve_for = [&](const GridField& rho) {
    StokesProblem p = prob;
    p.rho = rho;
    auto sol = solve_stokes(p, options);
    if (!sol.report.converged)
      fail(ErrorKind::MaxIterations, "Stokes solve did not converge in minty_sweep after " +
                                         std::to_string(sol.report.iterations) + " iterations");
    return sol.velocity;
  };
  const VelocityField limit = solve_for(rho_limit);
  std::vector<std::vector<double>> table(tests.size(), std::vector<double>(rho_sequence.size()));
  for (std::size_t i = 0; i < rho_sequence.size(); ++i) {
    const VelocityField diff = solve_for(rho_sequence[i]) - limit;
    for (std::size_t t = 0; t < tests.size(); ++t) table[t][i] = inner(diff, tests[t]);
  }
  return table;
}

namespace {

/// rho g + div S as a (non-projected) velocity-shaped field.
VelocityField momentum_source(const StokesProblem& prob, const VelocityField& u) {
  const SymTensorField S = stress(prob.law, prob.params, prob.rho, strain_tensor(u));
  VelocityField f = tensor_divergence(S);
  const SpectralField rho_hat = to_spectral(prob.rho);
  for (int a = 0; a < prob.params.d; ++a) f.components[a] += prob.params.g[a] * rho_hat;
  return f;
}

}  // namespace

SpectralField recover_pressure(const StokesProblem& prob, const VelocityField& u) {
  const VelocityField f = momentum_source(prob, u);
  const TorusGrid& g = prob.rho.grid;
  SpectralField pi(g);
  const auto modes = g.modes();
  for (std::size_t i = 1; i < modes.size(); ++i) {
    if (!modes[i].resolved) continue;
    Complex kf = 0.0;
    for (int a = 0; a < g.dim(); ++a) kf += static_cast<double>(modes[i].k[a]) * f.components[a].coeffs[i];
    pi.coeffs[i] = Complex(0.0, -1.0) * kf / modes[i].k2;
  }
  return pi;
}

double pressure_residual(const StokesProblem& prob, const VelocityField& u, const SpectralField& pi) {
  // residual = -(rho g + div S) + grad pi, on the velocity band without the
  // mean mode (the constant force is absorbed by the pressure convention).
  VelocityField r = momentum_source(prob, u);
  r *= -1.0;
  const TorusGrid& g = prob.rho.grid;
  const int kmax = two_thirds_cutoff(g.n());
  for (int a = 0; a < g.dim(); ++a) {
    r.components[a] += partial_derivative(pi, a);
    r.components[a] = box_truncate(r.components[a], kmax);
    r.components[a].coeffs[0] = 0.0;
  }
  return l2_norm(r);
}

}  // namespace nnst
