#include "lagctrl/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lagctrl/adjoint.hpp"

namespace lagctrl {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> residual_of(const ControlRun& run, const ControlProblem& problem) {
  std::vector<double> r(problem.d());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = run.terminal[i] - problem.betas[i];
  return r;
}

std::vector<double> solve_general(const Eigen::MatrixXd& J, std::span<const double> rhs) {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
  if (!lu.isInvertible())
    throw Error(ErrorKind::Diverged, "finite-difference Jacobian is singular");
  Eigen::VectorXd x = lu.solve(b);
  return {x.data(), x.data() + x.size()};
}

}  // namespace

void validate(const Numerics& n) {
  require(n.M >= 8, ErrorKind::Config, "numerics.M must be >= 8");
  require(n.cfl > 0.0 && n.cfl <= n.solver.cfl_limit, ErrorKind::Config,
          "numerics.cfl must lie in (0, numerics.cfl_limit]");
  require(n.N >= 1, ErrorKind::Config, "numerics.N must be >= 1");
  require(n.substeps >= 1, ErrorKind::Config, "numerics.substeps must be >= 1");
  require(n.tol_pos > 0.0, ErrorKind::Config, "numerics.tol_pos must be positive");
  require(n.max_iter >= 1, ErrorKind::Config, "numerics.max_iter must be >= 1");
  require(n.max_halvings >= 0, ErrorKind::Config, "numerics.max_halvings must be >= 0");
  require(n.stall_limit >= 1, ErrorKind::Config, "numerics.stall_limit must be >= 1");
  require(n.contraction > 0.0 && n.contraction < 1.0, ErrorKind::Config,
          "numerics.contraction must lie in (0, 1)");
  require(n.fd_rel >= 0.0 && n.fd_abs > 0.0, ErrorKind::Config, "numerics.fd_rel/fd_abs invalid");
  require(n.probes >= 2, ErrorKind::Config, "numerics.probes must be >= 2");
  require(n.solver.positivity_floor > 0.0 && n.solver.positivity_floor < 1.0, ErrorKind::Config,
          "numerics.positivity_floor must lie in (0, 1)");
  try {
    validate(n.quad);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.detail());
  }
}

Grid control_grid(const ControlProblem& problem, const GasModel& gas, const Numerics& numerics) {
  return Grid::from_cfl(numerics.M, problem.T, gas.c, numerics.cfl);
}

ControlRun run_control(std::span<const double> eps, const ControlProblem& problem,
                       const GasModel& gas, const Numerics& numerics,
                       std::span<const AdjointField> fields) {
  require(eps.size() == problem.d() && fields.size() == problem.d(), ErrorKind::InvalidArgument,
          "amplitude count must match the number of points");
  const Grid grid = control_grid(problem, gas, numerics);
  ControlRun run;
  run.epsilon.assign(eps.begin(), eps.end());
  ControlForcing forcing({fields.begin(), fields.end()}, problem.cutoff(), grid.nodes(),
                         run.epsilon);
  SolverOptions opts = numerics.solver;
  opts.keep_history = true;
  try {
    run.flow = solve_nonlinear(forcing.sampler(), grid, gas, opts);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::VacuumApproach:
      case ErrorKind::NonFiniteField:
      case ErrorKind::CflViolation:
        throw Error(ErrorKind::AmplitudeTooLarge, e.what());
      default:
        throw;
    }
  }
  IntegratorOptions io;
  io.substeps = numerics.substeps;
  const OrderReport ord = order_check(run.flow.history, problem.alphas, io);
  run.terminal = ord.terminal;
  run.ordered = ord.ordered;
  return run;
}

std::vector<double> theta(std::span<const double> eps, const ControlProblem& problem,
                          const GasModel& gas, const Numerics& numerics) {
  validate(problem);
  validate(numerics);
  const auto fields = problem.fields(gas, numerics.N, numerics.accel);
  ControlRun run = run_control(eps, problem, gas, numerics, fields);
  require(run.ordered, ErrorKind::AmplitudeTooLarge, "flow map lost the order of the points");
  return run.terminal;
}

const char* to_string(JacobianSource s) {
  return s == JacobianSource::GramLinear ? "gram" : "fd";
}

std::string format_iteration(const IterationLog& log) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "iter %d residual %.6e step %.6e damping %d jacobian %s",
                log.iteration, log.residual_norm, log.step_norm, log.damping, to_string(log.source));
  return buf;
}

Eigen::MatrixXd fd_jacobian(std::span<const double> eps, const ControlProblem& problem,
                            const GasModel& gas, const Numerics& numerics,
                            std::span<const AdjointField> fields) {
  const std::size_t d = problem.d();
  const double h = numerics.fd_rel * l2(eps) + numerics.fd_abs;
  std::vector<std::vector<double>> out(2 * d);
  std::vector<std::string> errors(2 * d);
  std::vector<int> kinds(2 * d, -1);
  const long tasks = static_cast<long>(2 * d);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < tasks; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    std::vector<double> e(eps.begin(), eps.end());
    e[uk / 2] += (uk % 2 == 0) ? h : -h;
    try {
      out[uk] = run_control(e, problem, gas, numerics, fields).terminal;
    } catch (const Error& err) {
      kinds[uk] = static_cast<int>(err.kind());
      errors[uk] = err.detail();
    }
  }
  for (std::size_t k = 0; k < 2 * d; ++k)
    if (kinds[k] >= 0) throw Error(static_cast<ErrorKind>(kinds[k]), errors[k]);
  Eigen::MatrixXd J(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      J(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          (out[2 * i][j] - out[2 * i + 1][j]) / (2.0 * h);
  return J;
}

SynthesisReport synthesize(const ControlProblem& problem, const GasModel& gas,
                           const Numerics& numerics, const SynthesisOptions& opts) {
  validate(problem);
  validate(gas);
  validate(numerics);
  const std::size_t d = problem.d();
  const auto fields = problem.fields(gas, numerics.N, numerics.accel);

  SynthesisReport rep;
  rep.gram = gram_matrix(problem, gas, numerics.N, numerics.quad, numerics.accel);
  if (opts.initial) {
    require(opts.initial->size() == d, ErrorKind::InvalidArgument,
            "initial guess has the wrong length");
    rep.initial_guess = *opts.initial;
  } else {
    rep.initial_guess = linear_predict(problem, rep.gram);
  }

  std::vector<double> eps = rep.initial_guess;
  ControlRun run = run_control(eps, problem, gas, numerics, fields);
  require(run.ordered, ErrorKind::AmplitudeTooLarge, "flow map lost the order of the points");
  std::vector<double> r = residual_of(run, problem);
  double rnorm = max_abs(r);

  auto emit = [&](const IterationLog& entry) {
    rep.log.push_back(entry);
    if (opts.log) *opts.log << format_iteration(entry) << '\n';
  };
  emit({0, rnorm, 0.0, 0, rep.jacobian_source, eps});

  auto finish = [&](bool converged) {
    rep.epsilon = eps;
    rep.residual = r;
    rep.converged = converged;
    rep.flow = run.flow.diag;
    IntegratorOptions io;
    io.substeps = numerics.substeps;
    rep.order = order_check(run.flow.history, probe_ladder(numerics.probes), io);
  };

  Eigen::MatrixXd J = rep.gram.matrix;
  int stalled = 0;
  while (rnorm > numerics.tol_pos) {
    if (rep.iterations >= numerics.max_iter) {
      finish(false);
      throw SynthesisFailure(ErrorKind::Diverged,
                             "no convergence after " + std::to_string(rep.iterations) +
                                 " iterations (residual " + std::to_string(rnorm) + ")",
                             rep);
    }
    // Theta(eps + s) - beta ~ r + J s = 0.
    std::vector<double> minus_r(d);
    for (std::size_t i = 0; i < d; ++i) minus_r[i] = -r[i];
    const std::vector<double> step = rep.jacobian_source == JacobianSource::GramLinear
                                         ? spd_solve(J, minus_r)
                                         : solve_general(J, minus_r);
    double lambda = 1.0;
    int halvings = 0;
    for (;;) {
      std::vector<double> trial(d);
      for (std::size_t i = 0; i < d; ++i) trial[i] = eps[i] + lambda * step[i];
      bool accepted = false;
      try {
        ControlRun cand = run_control(trial, problem, gas, numerics, fields);
        std::vector<double> rc = residual_of(cand, problem);
        const double cn = max_abs(rc);
        if (cand.ordered && cn < rnorm) {
          accepted = true;
          const double ratio = cn / rnorm;
          stalled = ratio > numerics.contraction ? stalled + 1 : 0;
          eps = std::move(trial);
          run = std::move(cand);
          r = std::move(rc);
          rnorm = cn;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::AmplitudeTooLarge) throw;
      }
      if (accepted) break;
      if (++halvings > numerics.max_halvings) {
        finish(false);
        throw SynthesisFailure(ErrorKind::Diverged,
                               "damping floor reached at iteration " +
                                   std::to_string(rep.iterations + 1),
                               rep);
      }
      lambda *= 0.5;
    }
    ++rep.iterations;
    emit({rep.iterations, rnorm, lambda * max_abs(step), halvings, rep.jacobian_source, eps});

    if (rnorm <= numerics.tol_pos) break;
    if (rep.jacobian_source == JacobianSource::GramLinear && stalled >= numerics.stall_limit)
      rep.jacobian_source = JacobianSource::FiniteDifference;
    if (rep.jacobian_source == JacobianSource::FiniteDifference)
      J = fd_jacobian(eps, problem, gas, numerics, fields);
  }
  finish(true);
  return rep;
}

}  // namespace lagctrl
