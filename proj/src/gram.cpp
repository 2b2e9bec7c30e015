#include "lagctrl/gram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lagctrl/error.hpp"

namespace lagctrl {

void validate(const QuadratureSpec& q) {
  require(q.t_panels >= 1 && q.x_panels >= 1, ErrorKind::InvalidArgument,
          "quadrature panel counts must be >= 1");
  require(q.nodes >= 1 && q.nodes <= 64, ErrorKind::InvalidArgument,
          "quadrature nodes per panel must be in [1, 64]");
}

QuadratureRule gauss_legendre(int q) {
  require(q >= 1, ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 1");
  QuadratureRule r;
  r.x.resize(static_cast<std::size_t>(q));
  r.w.resize(static_cast<std::size_t>(q));
  if (q == 1) {
    r.x[0] = 0.0;
    r.w[0] = 2.0;
    return r;
  }
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_q from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(q - 1 - i);
    r.x[lo] = -z;
    r.x[hi] = z;
    r.w[lo] = w;
    r.w[hi] = w;
  }
  if (q % 2 == 1) r.x[static_cast<std::size_t>(q / 2)] = 0.0;
  return r;
}

QuadratureRule composite_gauss(double a, double b, int panels, int q) {
  require(b > a && panels >= 1, ErrorKind::InvalidArgument, "composite rule needs b > a");
  const auto base = gauss_legendre(q);
  QuadratureRule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * h;
    for (std::size_t k = 0; k < base.x.size(); ++k) {
      r.x.push_back(left + 0.5 * h * (base.x[k] + 1.0));
      r.w.push_back(0.5 * h * base.w[k]);
    }
  }
  return r;
}

namespace {

template <bool Parallel>
Eigen::MatrixXd integrals_impl(std::span<const AdjointField> fields,
                               const std::function<double(double)>& weight, double x_lo,
                               double x_hi, const QuadratureSpec& quad) {
  validate(quad);
  require(!fields.empty(), ErrorKind::InvalidArgument, "gram needs at least one field");
  const double T = fields.front().T;
  const auto tr = composite_gauss(0.0, T, quad.t_panels, quad.nodes);
  const auto xr = composite_gauss(x_lo, x_hi, quad.x_panels, quad.nodes);

  std::vector<double> wx(xr.x.size());
  for (std::size_t l = 0; l < xr.x.size(); ++l) wx[l] = xr.w[l] * weight(xr.x[l]);

  std::vector<Table2D> xi;
  xi.reserve(fields.size());
  for (const auto& f : fields)
    xi.push_back(Parallel ? xi_batch(f, tr.x, xr.x) : xi_batch_serial(f, tr.x, xr.x));

  const std::size_t d = fields.size();
  const long panels = quad.t_panels;
  const std::size_t q = static_cast<std::size_t>(quad.nodes);
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(panels),
                                       Eigen::MatrixXd::Zero(static_cast<long>(d), static_cast<long>(d)));
#pragma omp parallel for schedule(static) if (Parallel)
  for (long p = 0; p < panels; ++p) {
    auto& acc = partial[static_cast<std::size_t>(p)];
    for (std::size_t kk = 0; kk < q; ++kk) {
      const std::size_t k = static_cast<std::size_t>(p) * q + kk;
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const auto ri = xi[i].row(k);
          const auto rj = xi[j].row(k);
          double s = 0.0;
          for (std::size_t l = 0; l < wx.size(); ++l) s += wx[l] * ri[l] * rj[l];
          acc(static_cast<long>(i), static_cast<long>(j)) += tr.w[k] * s;
        }
      }
    }
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<long>(d), static_cast<long>(d));
  for (const auto& part : partial) G += part;
  return G;
}

}  // namespace

Eigen::MatrixXd gram_integrals(std::span<const AdjointField> fields,
                               const std::function<double(double)>& weight, double x_lo,
                               double x_hi, const QuadratureSpec& quad) {
  return integrals_impl<true>(fields, weight, x_lo, x_hi, quad);
}

Eigen::MatrixXd gram_integrals_serial(std::span<const AdjointField> fields,
                                      const std::function<double(double)>& weight, double x_lo,
                                      double x_hi, const QuadratureSpec& quad) {
  return integrals_impl<false>(fields, weight, x_lo, x_hi, quad);
}

GramReport make_report(const Eigen::MatrixXd& raw, const QuadratureSpec& quad, int truncation) {
  GramReport r;
  r.d = static_cast<int>(raw.rows());
  r.quad = quad;
  r.truncation = truncation;
  r.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  r.matrix = 0.5 * (raw + raw.transpose());
  r.det = r.matrix.determinant();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.matrix, Eigen::EigenvaluesOnly);
  r.spectrum = es.eigenvalues();
  r.min_eigenvalue = r.spectrum.minCoeff();
  r.max_eigenvalue = r.spectrum.maxCoeff();
  r.condition_number = r.min_eigenvalue > 0.0 ? r.max_eigenvalue / r.min_eigenvalue
                                              : std::numeric_limits<double>::infinity();
  r.degenerate = !(r.min_eigenvalue > kDegeneracyTol * r.max_eigenvalue);
  return r;
}

GramReport gram_report(const ControlProblem& problem, const GasModel& gas, int N,
                       const QuadratureSpec& quad, bool accel) {
  validate(problem);
  validate(gas);
  const auto fields = problem.fields(gas, N, accel);
  const Cutoff w = problem.cutoff();
  const auto G = gram_integrals(fields, [&](double x) { return chi_eval(w, x); }, w.lo, w.hi, quad);
  return make_report(G, quad, N);
}

GramReport gram_matrix(const ControlProblem& problem, const GasModel& gas, int N,
                       const QuadratureSpec& quad, bool accel) {
  auto r = gram_report(problem, gas, N, quad, accel);
  require(!r.degenerate, ErrorKind::DegenerateGram,
          "Gram matrix is numerically singular (min eigenvalue " +
              std::to_string(r.min_eigenvalue) + ", max " + std::to_string(r.max_eigenvalue) + ")");
  return r;
}

std::vector<double> spd_solve(const Eigen::MatrixXd& G, std::span<const double> rhs) {
  require(static_cast<std::size_t>(G.rows()) == rhs.size(), ErrorKind::InvalidArgument,
          "spd_solve dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  require(llt.info() == Eigen::Success, ErrorKind::DegenerateGram,
          "matrix is not positive definite");
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<long>(rhs.size()));
  const Eigen::VectorXd x = llt.solve(b);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> linear_predict(const ControlProblem& problem, const GramReport& report) {
  require(!report.degenerate, ErrorKind::DegenerateGram, "cannot invert a degenerate Gram matrix");
  require(problem.d() == static_cast<std::size_t>(report.d), ErrorKind::InvalidArgument,
          "Gram report dimension does not match the problem");
  std::vector<double> rhs(problem.d());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = problem.betas[i] - problem.alphas[i];
  return spd_solve(report.matrix, rhs);
}

}  // namespace lagctrl
