#pragma once

// Endpoint map Theta(eps) = (phi[sum eps_i f_i](T, alpha_i))_i on the discrete
// pipeline (nonlinear solve + flow map) and the shooting iteration that solves
// Theta(eps) = beta.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lagctrl/error.hpp"
#include "lagctrl/flowmap.hpp"
#include "lagctrl/gram.hpp"
#include "lagctrl/pde.hpp"
#include "lagctrl/problem.hpp"

namespace lagctrl {

struct Numerics {
  int M = 512;
  /// dt = cfl * dx / c at construction; the solver re-checks its own limit every step.
  double cfl = 0.4;
  int N = 2048;
  bool accel = true;
  QuadratureSpec quad;
  SolverOptions solver;
  int substeps = 1;

  double tol_pos = 1e-6;
  int max_iter = 25;
  /// A step is halved at most this many times before the iteration gives up.
  int max_halvings = 12;
  /// Non-contracting iterations (ratio above `contraction`) before switching
  /// to the finite-difference Jacobian.
  int stall_limit = 3;
  double contraction = 0.5;
  double fd_rel = 1e-4;
  double fd_abs = 1e-6;
  int probes = 64;
};

void validate(const Numerics& numerics);

Grid control_grid(const ControlProblem& problem, const GasModel& gas, const Numerics& numerics);

/// One forward run of the pipeline at amplitudes eps.
struct ControlRun {
  std::vector<double> epsilon;
  NonlinearResult flow;
  std::vector<double> terminal;  // phi(T, alpha_i)
  bool ordered = true;           // terminal strictly increasing
};

/// Solver failures that mean "left the small-data regime" (vacuum, blow-up,
/// CFL) are rethrown as AmplitudeTooLarge.
ControlRun run_control(std::span<const double> eps, const ControlProblem& problem,
                       const GasModel& gas, const Numerics& numerics,
                       std::span<const AdjointField> fields);

std::vector<double> theta(std::span<const double> eps, const ControlProblem& problem,
                          const GasModel& gas, const Numerics& numerics);

enum class JacobianSource { GramLinear, FiniteDifference };
const char* to_string(JacobianSource s);

struct IterationLog {
  int iteration = 0;
  double residual_norm = 0.0;  // max |Theta - beta| after the step
  double step_norm = 0.0;      // max |accepted step|
  int damping = 0;             // halvings applied to the step
  JacobianSource source = JacobianSource::GramLinear;
  std::vector<double> epsilon;
};

/// "iter <k> residual <r> step <s> damping <h> jacobian <gram|fd>"
std::string format_iteration(const IterationLog& log);

struct SynthesisReport {
  std::vector<double> epsilon;
  std::vector<double> residual;  // Theta(eps) - beta
  std::vector<double> initial_guess;
  int iterations = 0;
  JacobianSource jacobian_source = JacobianSource::GramLinear;
  bool converged = false;
  std::vector<IterationLog> log;
  GramReport gram;
  NonlinDiag flow;
  OrderReport order;  // probe ladder on the accepted run
};

/// Thrown when the iteration cap or the damping floor is hit; carries the
/// last state of the iteration.
class SynthesisFailure : public Error {
 public:
  SynthesisFailure(ErrorKind kind, const std::string& what, SynthesisReport report)
      : Error(kind, what), report_(std::move(report)) {}
  const SynthesisReport& report() const { return report_; }

 private:
  SynthesisReport report_;
};

struct SynthesisOptions {
  /// Start here instead of the Gram prediction.
  std::optional<std::vector<double>> initial;
  /// Receives one format_iteration line per iteration.
  std::ostream* log = nullptr;
};

SynthesisReport synthesize(const ControlProblem& problem, const GasModel& gas,
                           const Numerics& numerics, const SynthesisOptions& opts = {});

/// Central differences of Theta around eps, columns evaluated in parallel.
Eigen::MatrixXd fd_jacobian(std::span<const double> eps, const ControlProblem& problem,
                            const GasModel& gas, const Numerics& numerics,
                            std::span<const AdjointField> fields);

}  // namespace lagctrl
