#pragma once

// Trigonometric Vandermonde determinants D = det(sin(i alpha_j)), the
// Chebyshev-type polynomials S_i with sin(i t) = S_i(cos t) sin t, and the
// cross-module identity suite (duality, linearization, Gram checks).

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lagctrl/control.hpp"

namespace lagctrl {

/// 2^{d(d-1)} prod_i sin(a_i) prod_{i<j} sin((a_i - a_j)/2) sin((a_i + a_j)/2).
/// Input order matters (the sign follows the column order of D).
double trig_vandermonde_closed(std::span<const double> alphas);

/// LU determinant of the d x d matrix (sin(i alpha_j)), i = 1..d. SizeLimit for d > 12.
double trig_vandermonde_brute(std::span<const double> alphas);

inline constexpr int kTrigBruteMaxDim = 12;

/// Coefficients of S_i in increasing powers of x. i in [1, 62].
std::vector<std::int64_t> chebyshev_S(int i);

double eval_poly(std::span<const std::int64_t> coeffs, double x);

struct TrigDetCase {
  std::vector<double> alphas;
  double closed_form = 0.0;
  double brute_force = 0.0;
  double rel_error = 0.0;
};

inline constexpr double kTrigRelFloor = 1e-15;

TrigDetCase trig_case(std::vector<double> alphas);

/// Uniform strictly increasing tuple in (0, pi) with consecutive gaps >= min_gap.
/// Tuples are drawn serially from one seeded stream; cases are evaluated in parallel.
std::vector<TrigDetCase> trig_batch(int d, int count, std::uint64_t seed, double min_gap = 1e-3);

// ---- identity suite ---------------------------------------------------------

enum class CheckStatus { Pass, Fail, Skip };
const char* to_string(CheckStatus s);

struct CheckResult {
  std::string group;  // duality | linearization | gram | trig
  std::string name;
  CheckStatus status = CheckStatus::Skip;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteOptions {
  /// Empty: all groups.
  std::set<std::string> only;
  /// Multiplies every error tolerance (not the convergence-order thresholds).
  double tolerance_scale = 1.0;
  std::uint64_t seed = 20240607;
  int trig_cases = 1000;
  int trig_max_d = 6;
  /// Coarse grid of the duality refinement study (the fine one is twice as many cells).
  int duality_M = 1024;
  double duality_tol = 0.02;
  double duality_min_order = 1.0;
  std::vector<double> ladder{1e-2, 5e-3, 2.5e-3};
  double ladder_ratio = 0.7;
  double gram_sym_tol = 1e-12;
  double trig_tol = 1e-10;
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

SuiteReport identity_suite(const ControlProblem& problem, const GasModel& gas,
                           const Numerics& numerics, const SuiteOptions& opts = {});

void print_table(std::ostream& out, const SuiteReport& report);

inline const std::vector<std::string>& suite_groups() {
  static const std::vector<std::string> g{"duality", "linearization", "gram", "trig"};
  return g;
}

/// int_0^T v_i(t, alpha_j) dt from the linearized solver driven by f_i on `grid`.
/// Row i holds the d values for source i.
Eigen::MatrixXd duality_matrix(const ControlProblem& problem, const GasModel& gas,
                               const Grid& grid, int N, bool accel = true);

}  // namespace lagctrl
