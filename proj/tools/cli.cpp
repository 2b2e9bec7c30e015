#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lagctrl/config.hpp"
#include "lagctrl/control.hpp"
#include "lagctrl/error.hpp"
#include "lagctrl/flowmap.hpp"
#include "lagctrl/gram.hpp"
#include "lagctrl/parallel.hpp"
#include "lagctrl/report.hpp"
#include "lagctrl/verify.hpp"

namespace lagctrl::cli {

namespace fs = std::filesystem;

namespace {

// Gram reports beyond either bound are flagged as close to singular. Below
// kWeakEigenvalue a 1e-3 displacement along the weakest direction needs
// amplitudes above 1e5.
constexpr double kNearDegenerateCond = 1e8;
constexpr double kWeakEigenvalue = 1e-8;

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  int threads = 0;
  bool dry_run = false;
  std::vector<double> eps;
  std::vector<std::string> only;
  double tolerance_scale = 0.0;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateGram: return kDegenerateGram;
    case ErrorKind::Diverged: return kDiverged;
    case ErrorKind::AmplitudeTooLarge:
    case ErrorKind::VacuumApproach:
    case ErrorKind::NonFiniteField:
    case ErrorKind::CflViolation: return kAmplitudeTooLarge;
    default: return kConfigOrIo;
  }
}

RunConfig load(const Options& o) {
  RunConfig cfg;
  if (!o.config.empty()) apply_raw(cfg, parse_config_file(o.config));
  RawConfig over;
  for (const auto& s : o.overrides) {
    auto [k, v] = parse_override(s);
    over[k] = v;
  }
  apply_raw(cfg, over);
  if (o.tolerance_scale > 0.0) cfg.verify.tolerance_scale = o.tolerance_scale;
  for (const auto& g : o.only) cfg.verify.only.insert(g);
  validate(cfg);
  for (const auto& g : cfg.verify.only)
    require(std::find(suite_groups().begin(), suite_groups().end(), g) != suite_groups().end(),
            ErrorKind::Config, "--only: unknown check group '" + g + "'");
  return cfg;
}

fs::path prepare_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
  return dir;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_xi_csv(const RunConfig& cfg, const fs::path& path) {
  const auto fields = cfg.problem.fields(cfg.gas, cfg.numerics.N, cfg.numerics.accel);
  const Cutoff cut = cfg.problem.cutoff();
  const int nt = cfg.output.xi_t_samples, nx = cfg.output.xi_x_samples;
  std::vector<double> ts(static_cast<std::size_t>(nt)), xs(static_cast<std::size_t>(nx));
  for (int k = 0; k < nt; ++k) ts[static_cast<std::size_t>(k)] = cfg.problem.T * k / (nt - 1);
  for (int l = 0; l < nx; ++l)
    xs[static_cast<std::size_t>(l)] =
        cut.lo + (cut.hi - cut.lo) * l / (nx - 1);
  std::vector<Table2D> tables;
  for (const auto& f : fields) tables.push_back(xi_batch(f, ts, xs));
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out << "t,x,chi";
  for (std::size_t i = 0; i < fields.size(); ++i) out << ",xi_" << i + 1;
  out << '\n';
  for (std::size_t k = 0; k < ts.size(); ++k)
    for (std::size_t l = 0; l < xs.size(); ++l) {
      out << fmt(ts[k]) << ',' << fmt(xs[l]) << ',' << fmt(chi_eval(cut, xs[l]));
      for (const auto& t : tables) out << ',' << fmt(t(k, l));
      out << '\n';
    }
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

void write_profile_csv(const fs::path& path, const char* name, const std::vector<double>& x,
                       const std::vector<double>& y) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out << "x," << name << '\n';
  for (std::size_t k = 0; k < x.size(); ++k) out << fmt(x[k]) << ',' << fmt(y[k]) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

// Trajectory CSVs and the final (rho, u) profiles of one forward run.
void write_run_outputs(const RunConfig& cfg, const ControlRun& run, const fs::path& dir) {
  if (!cfg.output.csv) return;
  IntegratorOptions io;
  io.substeps = cfg.numerics.substeps;
  for (std::size_t i = 0; i < cfg.problem.d(); ++i)
    write_trace_csv(advect(run.flow.history, cfg.problem.alphas[i], io),
                    dir / ("trajectory_" + std::to_string(i + 1) + ".csv"));
  const Grid grid = control_grid(cfg.problem, cfg.gas, cfg.numerics);
  write_profile_csv(dir / "final_rho.csv", "rho", grid.centers(), run.flow.final_state.rho);
  write_profile_csv(dir / "final_u.csv", "u", grid.nodes(), run.flow.final_state.u);
}

int cmd_gram(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = prepare_dir(cfg);
  const GramReport g = gram_report(cfg.problem, cfg.gas, cfg.numerics.N, cfg.numerics.quad,
                                   cfg.numerics.accel);
  write_json(envelope("gram", cfg, to_json(g)), dir / "gram.json");
  if (cfg.output.csv) write_xi_csv(cfg, dir / "xi_samples.csv");
  if (g.degenerate) {
    err << "error: Gram matrix is numerically singular (lambda_min = " << fmt(g.min_eigenvalue)
        << ", lambda_max = " << fmt(g.max_eigenvalue) << ")\n";
    return kDegenerateGram;
  }
  if (g.condition_number > kNearDegenerateCond || g.min_eigenvalue < kWeakEigenvalue)
    err << "warning: near-degenerate Gram matrix, lambda_min = " << fmt(g.min_eigenvalue)
        << ", condition number " << fmt(g.condition_number) << '\n';
  out << "det G = " << fmt(g.det) << ", condition number " << fmt(g.condition_number) << '\n';
  return kOk;
}

int cmd_synthesize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = prepare_dir(cfg);
  SynthesisOptions so;
  so.log = &out;
  SynthesisReport rep;
  try {
    rep = synthesize(cfg.problem, cfg.gas, cfg.numerics, so);
  } catch (const SynthesisFailure& e) {
    write_json(envelope("synthesize", cfg, to_json(e.report())), dir / "synthesis.json");
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  write_json(envelope("synthesize", cfg, to_json(rep)), dir / "synthesis.json");
  const auto fields = cfg.problem.fields(cfg.gas, cfg.numerics.N, cfg.numerics.accel);
  const ControlRun run = run_control(rep.epsilon, cfg.problem, cfg.gas, cfg.numerics, fields);
  write_run_outputs(cfg, run, dir);
  out << "converged in " << rep.iterations << " iterations, eps =";
  for (double e : rep.epsilon) out << ' ' << fmt(e);
  out << '\n';
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const std::vector<double>& eps_in, std::ostream& out) {
  std::vector<double> eps = eps_in;
  if (eps.empty()) eps.assign(cfg.problem.d(), 0.0);
  require(eps.size() == cfg.problem.d(), ErrorKind::Config,
          "--eps needs " + std::to_string(cfg.problem.d()) + " values");
  const fs::path dir = prepare_dir(cfg);
  const auto fields = cfg.problem.fields(cfg.gas, cfg.numerics.N, cfg.numerics.accel);
  const ControlRun run = run_control(eps, cfg.problem, cfg.gas, cfg.numerics, fields);
  if (cfg.output.binary) write_history_binary(run.flow.history, dir / "history.lcns");
  if (cfg.output.csv) write_history_csv(run.flow.history, dir / "history.csv", cfg.output.csv_stride);
  write_run_outputs(cfg, run, dir);

  json res;
  json e = json::array(), term = json::array(), resid = json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    e.push_back(eps[i]);
    term.push_back(run.terminal[i]);
    resid.push_back(run.terminal[i] - cfg.problem.betas[i]);
  }
  res["epsilon"] = e;
  res["terminal"] = term;
  res["residual"] = resid;
  res["ordered"] = run.ordered;
  res["flow"] = to_json(run.flow.diag);
  write_json(envelope("simulate", cfg, res), dir / "simulate.json");
  out << "phi(T, alpha) =";
  for (double t : run.terminal) out << ' ' << fmt(t);
  out << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = prepare_dir(cfg);
  const SuiteReport rep = identity_suite(cfg.problem, cfg.gas, cfg.numerics, cfg.verify);
  write_json(envelope("verify", cfg, to_json(rep)), dir / "verify.json");
  print_table(out, rep);
  return rep.all_pass() ? kOk : kChecksFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lagrangian control of 1D compressible Navier-Stokes"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-c,--config", o.config, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", o.overrides, "override, section.key=value (repeatable)");
  app.add_option("--threads", o.threads, "worker thread cap")
      ->envname("LAGCTRL_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dry-run", o.dry_run, "validate and print the resolved configuration");

  auto* gram = app.add_subcommand("gram", "Gram matrix report and xi samples");
  auto* synth = app.add_subcommand("synthesize", "shooting iteration for Theta(eps) = beta");
  auto* sim = app.add_subcommand("simulate", "one forward run at given amplitudes");
  sim->add_option("--eps", o.eps, "amplitudes (default: all zero)")->delimiter(',');
  auto* ver = app.add_subcommand("verify", "identity and determinant checks");
  ver->add_option("--only", o.only, "check groups: duality, linearization, gram, trig")
      ->delimiter(',');
  ver->add_option("--tolerance-scale", o.tolerance_scale, "multiply all error tolerances")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store(args);
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigOrIo;
  }

  try {
    const RunConfig cfg = load(o);
    if (o.threads > 0) parallel::set_threads(o.threads);
    if (o.dry_run) {
      out << to_config_text(cfg);
      return kOk;
    }
    if (*gram) return cmd_gram(cfg, out, err);
    if (*synth) return cmd_synthesize(cfg, out, err);
    if (*sim) return cmd_simulate(cfg, o.eps, out);
    if (*ver) return cmd_verify(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigOrIo;
  }
  return kConfigOrIo;
}

}  // namespace lagctrl::cli
