#include "nnst/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "nnst/error.hpp"
#include "nnst/fft.hpp"
#include "nnst/io.hpp"
#include "nnst/simulator.hpp"
#include "nnst/spectral.hpp"
#include "nnst/stokes.hpp"
#include "nnst/verify.hpp"

namespace nnst {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string out_dir;
  bool force = false;
  bool quiet = false;
  std::optional<std::uint64_t> seed;
};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_exponent(const std::string& s, const char* what) {
  if (s == "inf") return kInfinity;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail(ErrorKind::BadValue, std::string(what) + " must be a number or inf");
  return v;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MaxIterations:
    case ErrorKind::DegenerateViscosity:
    case ErrorKind::CflViolation: return kExitSolver;
    case ErrorKind::InvalidArgument: return kExitUsage;
    default: return kExitConfig;
  }
}

SimulationConfig load(const std::string& path, const Options& opt, bool force) {
  SimulationConfig cfg = load_config(path, force);
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

fs::path prepare_out_dir(const Options& opt) {
  fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

int cmd_simulate(const std::string& path, const Options& opt, std::ostream& out, std::ostream& err) {
  const SimulationConfig cfg = load(path, opt, opt.force);
  if (cfg.exponents.cls == ExponentClass::Inadmissible)
    err << "warning: forced run with inadmissible exponents (Q = " << cfg.exponents.Q << ")\n";
  const RunResult res = run(cfg);
  const std::string csv = write_diagnostics(res.series);
  if (!opt.out_dir.empty()) {
    const fs::path dir = prepare_out_dir(opt);
    write_text_file(dir / "diagnostics.csv", csv);
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "rho_%04zu.nnst", i);
      write_snapshot(dir / name, res.snapshots[i]);
    }
    std::string info = "exponent_class = " + to_string(cfg.exponents.cls) + "\nQ = " + g17(cfg.exponents.Q) +
                       "\nforced = " + (cfg.forced ? "true" : "false") + "\nsteps = " + std::to_string(res.steps) +
                       "\naborted = " + (res.aborted ? "true" : "false") + "\n";
    if (res.aborted) info += "abort_reason = " + res.abort_reason + "\n";
    write_text_file(dir / "run.txt", info);
  }
  if (!opt.quiet) {
    if (opt.out_dir.empty())
      out << csv;
    else
      out << "wrote " << res.series.size() << " records and " << res.snapshots.size() << " snapshots to "
          << opt.out_dir << "\n";
  }
  if (res.aborted) {
    err << "error: run aborted: " << res.abort_reason << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_solve(const std::string& path, const Options& opt, std::ostream& out, std::ostream& err) {
  const SimulationConfig cfg = load(path, opt, opt.force);
  const StokesProblem prob{smoothed_initial_density(cfg), cfg.params, cfg.law, cfg.penalty};
  const StokesSolution sol = solve_stokes(prob);
  const StokesReport& r = sol.report;
  std::string text = "converged = " + std::string(r.converged ? "true" : "false") +
                     "\niterations = " + std::to_string(r.iterations) + "\nfunctional = " + g17(r.functional_value) +
                     "\ngradient_norm = " + g17(r.gradient_norm) + "\ntolerance = " + g17(r.tolerance) +
                     "\nenergy_residual = " + g17(r.energy_residual) + "\neffective_delta = " + g17(r.effective_delta) +
                     "\nvelocity_l2 = " + g17(l2_norm(sol.velocity)) + "\n";
  if (!std::isnan(r.hk_ratio)) text += "hk_ratio = " + g17(r.hk_ratio) + "\n";
  if (!opt.out_dir.empty()) write_text_file(prepare_out_dir(opt) / "stokes.txt", text);
  if (!opt.quiet) out << text;
  if (!r.converged) {
    err << "error: Stokes solve did not converge\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, const Options& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  if (suite == "all")
    for (auto s : suite_names()) names.emplace_back(s);
  else
    names.push_back(suite);
  bool ok = true;
  for (const auto& name : names) {
    const SuiteReport rep = run_suite(name, opt.seed.value_or(0));
    for (const auto& c : rep.checks) {
      if (!opt.quiet || !c.passed)
        out << (c.passed ? "PASS " : "FAIL ") << rep.suite << ": " << c.name << (c.detail.empty() ? "" : " [" + c.detail + "]")
            << "\n";
    }
    ok = ok && rep.passed();
  }
  if (!ok) err << "error: verification failed\n";
  return ok ? kExitOk : kExitVerify;
}

int cmd_classify(const std::string& path, const Options& opt, std::ostream& out) {
  const SimulationConfig cfg = load(path, opt, true);
  out << to_string(cfg.exponents.cls) << "\n";
  if (!opt.quiet)
    out << "Q = " << g17(cfg.exponents.Q) << "\nq >= 2d/(d+2): " << (cfg.exponents.q_condition ? "yes" : "no") << "\n";
  return kExitOk;
}

int cmd_besov(const std::string& path, const std::string& s, const std::string& p, const std::string& r,
              std::ostream& out) {
  const Snapshot snap = read_snapshot(path);
  const double value =
      besov_norm(to_spectral(snap.rho), parse_exponent(s, "--s"), parse_exponent(p, "--p"), parse_exponent(r, "--r"));
  out << g17(value) << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-spectral non-Newtonian Stokes-transport simulator", "nnst"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_flag("--force", opt.force, "Run configurations with inadmissible exponents");
  app.add_flag("--quiet", opt.quiet, "Only print essential output");
  app.add_option_function<std::uint64_t>("--seed", [&opt](std::uint64_t s) { opt.seed = s; }, "Random seed");

  std::string config_path;
  std::string suite;
  std::string snapshot_path;
  std::string bs = "0";
  std::string bp = "2";
  std::string br = "2";

  auto* simulate = app.add_subcommand("simulate", "Run the coupled Stokes-transport system");
  simulate->add_option("config", config_path, "Configuration file")->required();
  auto* solve = app.add_subcommand("solve-stokes", "Solve for the velocity at the initial density");
  solve->add_option("config", config_path, "Configuration file")->required();
  auto* verify = app.add_subcommand("verify", "Run an invariant battery");
  std::string suite_help = "Suite: all";
  for (auto s : suite_names()) suite_help += ", " + std::string(s);
  verify->add_option("suite", suite, suite_help)->required();
  auto* classify = app.add_subcommand("classify", "Classify the exponents of a configuration");
  classify->add_option("config", config_path, "Configuration file")->required();
  auto* besov = app.add_subcommand("besov", "Besov norm of a density snapshot");
  besov->add_option("snapshot", snapshot_path, "Snapshot file")->required();
  besov->add_option("--s", bs, "Regularity index");
  besov->add_option("--p", bp, "Integrability exponent (or inf)");
  besov->add_option("--r", br, "Summation exponent (or inf)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, opt, out, err);
    if (solve->parsed()) return cmd_solve(config_path, opt, out, err);
    if (verify->parsed()) return cmd_verify(suite, opt, out, err);
    if (classify->parsed()) return cmd_classify(config_path, opt, out);
    if (besov->parsed()) return cmd_besov(snapshot_path, bs, bp, br, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace nnst
