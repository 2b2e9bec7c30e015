#pragma once

// Gram matrix G_ij = int_0^T int_omega chi_eta xi_i xi_j dx dt. By duality it
// equals int_0^T v_i(t, alpha_j) dt, the derivative of the endpoint map at zero
// control, so det G is the Jacobian of that map.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "lagctrl/problem.hpp"

namespace lagctrl {

struct QuadratureSpec {
  int t_panels = 16;
  int x_panels = 16;
  int nodes = 8;  // Gauss-Legendre nodes per panel, both directions
};

void validate(const QuadratureSpec& q);

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// q-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int q);

/// Composite rule on [a, b]: `panels` equal panels, q nodes each, ordered by panel.
QuadratureRule composite_gauss(double a, double b, int panels, int q);

/// Relative degeneracy threshold: min eigenvalue <= kDegeneracyTol * max eigenvalue.
inline constexpr double kDegeneracyTol = 1e-12;

struct GramReport {
  int d = 0;
  Eigen::MatrixXd matrix;
  double det = 0.0;
  Eigen::VectorXd spectrum;  // ascending
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double condition_number = 0.0;
  QuadratureSpec quad;
  int truncation = 0;
  /// Largest |G - G^T| entry before symmetrization.
  double asymmetry = 0.0;
  bool degenerate = false;
};

/// Raw weighted integrals int_0^T int_{x_lo}^{x_hi} weight(x) xi_i xi_j, not symmetrized.
/// Panels in t are reduced in a fixed order, so the result does not depend on
/// the thread count.
Eigen::MatrixXd gram_integrals(std::span<const AdjointField> fields,
                               const std::function<double(double)>& weight, double x_lo,
                               double x_hi, const QuadratureSpec& quad);

/// Serial reference of gram_integrals.
Eigen::MatrixXd gram_integrals_serial(std::span<const AdjointField> fields,
                                      const std::function<double(double)>& weight, double x_lo,
                                      double x_hi, const QuadratureSpec& quad);

/// Symmetrizes by (G + G^T)/2 and fills determinant, spectrum and the degeneracy flag.
GramReport make_report(const Eigen::MatrixXd& raw, const QuadratureSpec& quad, int truncation);

/// Full report; never throws on degeneracy (see `degenerate`).
GramReport gram_report(const ControlProblem& problem, const GasModel& gas, int N,
                       const QuadratureSpec& quad = {}, bool accel = true);

/// As gram_report, but throws DegenerateGram when the matrix is numerically singular.
GramReport gram_matrix(const ControlProblem& problem, const GasModel& gas, int N,
                       const QuadratureSpec& quad = {}, bool accel = true);

/// First-order amplitudes: solves G eps = beta - alpha.
std::vector<double> linear_predict(const ControlProblem& problem, const GramReport& report);

/// SPD solve G x = rhs; throws DegenerateGram on failure.
std::vector<double> spd_solve(const Eigen::MatrixXd& G, std::span<const double> rhs);

}  // namespace lagctrl
