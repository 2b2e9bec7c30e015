#include "lagctrl/verify.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "lagctrl/error.hpp"

namespace lagctrl {

namespace {

constexpr double kPi = std::numbers::pi;

bool wanted(const SuiteOptions& o, const std::string& group) {
  return o.only.empty() || o.only.count(group) > 0;
}

CheckResult check_le(std::string group, std::string name, double measured, double tol,
                     std::string detail = {}) {
  CheckResult c{std::move(group), std::move(name), CheckStatus::Fail, measured, tol,
                std::move(detail)};
  if (measured <= tol) c.status = CheckStatus::Pass;
  return c;
}

CheckResult check_ge(std::string group, std::string name, double measured, double tol,
                     std::string detail = {}) {
  CheckResult c{std::move(group), std::move(name), CheckStatus::Fail, measured, tol,
                std::move(detail)};
  if (measured >= tol) c.status = CheckStatus::Pass;
  return c;
}

CheckResult failed(std::string group, std::string name, const std::exception& e) {
  return {std::move(group), std::move(name), CheckStatus::Fail, 0.0, 0.0, e.what()};
}

std::string ij(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

}  // namespace

double trig_vandermonde_closed(std::span<const double> a) {
  const std::size_t d = a.size();
  require(d >= 1, ErrorKind::InvalidArgument, "trig determinant needs d >= 1");
  double p = std::ldexp(1.0, static_cast<int>(d * (d - 1)));
  for (std::size_t i = 0; i < d; ++i) p *= std::sin(a[i]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      p *= std::sin(0.5 * (a[i] - a[j])) * std::sin(0.5 * (a[i] + a[j]));
  return p;
}

double trig_vandermonde_brute(std::span<const double> a) {
  const std::size_t d = a.size();
  require(d >= 1, ErrorKind::InvalidArgument, "trig determinant needs d >= 1");
  require(d <= static_cast<std::size_t>(kTrigBruteMaxDim), ErrorKind::SizeLimit,
          "brute-force determinant limited to d <= " + std::to_string(kTrigBruteMaxDim));
  // Extended precision: with close points the matrix is ill-conditioned and a
  // double LU loses roughly cond * 1e-16 of relative accuracy.
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatrixL S(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::sin(static_cast<long double>(i + 1) * static_cast<long double>(a[j]));
  return static_cast<double>(S.partialPivLu().determinant());
}

std::vector<std::int64_t> chebyshev_S(int i) {
  require(i >= 1 && i <= 62, ErrorKind::InvalidArgument, "chebyshev_S needs 1 <= i <= 62");
  std::vector<std::int64_t> prev{0};  // S_0 = 0
  std::vector<std::int64_t> cur{1};   // S_1 = 1
  for (int k = 1; k < i; ++k) {
    std::vector<std::int64_t> next(cur.size() + 1, 0);
    for (std::size_t p = 0; p < cur.size(); ++p) next[p + 1] += 2 * cur[p];
    for (std::size_t p = 0; p < prev.size(); ++p) next[p] -= prev[p];
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double eval_poly(std::span<const std::int64_t> coeffs, double x) {
  double y = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) y = y * x + static_cast<double>(coeffs[k]);
  return y;
}

TrigDetCase trig_case(std::vector<double> alphas) {
  TrigDetCase c;
  c.alphas = std::move(alphas);
  c.closed_form = trig_vandermonde_closed(c.alphas);
  c.brute_force = trig_vandermonde_brute(c.alphas);
  c.rel_error =
      std::abs(c.closed_form - c.brute_force) / std::max(std::abs(c.brute_force), kTrigRelFloor);
  return c;
}

std::vector<TrigDetCase> trig_batch(int d, int count, std::uint64_t seed, double min_gap) {
  require(d >= 1 && count >= 0, ErrorKind::InvalidArgument, "trig_batch needs d >= 1");
  require(min_gap >= 0.0 && min_gap * (d + 1) < kPi, ErrorKind::InvalidArgument,
          "minimum gap too large for d points in (0, pi)");
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(d)));
  std::uniform_real_distribution<double> uni(0.0, kPi);
  std::vector<std::vector<double>> tuples;
  tuples.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(tuples.size()) < count) {
    std::vector<double> a(static_cast<std::size_t>(d));
    for (double& x : a) x = uni(rng);
    std::sort(a.begin(), a.end());
    bool ok = a.front() > 0.0;
    for (std::size_t k = 1; k < a.size() && ok; ++k) ok = a[k] - a[k - 1] >= min_gap;
    if (ok) tuples.push_back(std::move(a));
  }
  std::vector<TrigDetCase> out(tuples.size());
  const long n = static_cast<long>(tuples.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k)
    out[static_cast<std::size_t>(k)] = trig_case(tuples[static_cast<std::size_t>(k)]);
  return out;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

bool SuiteReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

Eigen::MatrixXd duality_matrix(const ControlProblem& problem, const GasModel& gas,
                               const Grid& grid, int N, bool accel) {
  const std::size_t d = problem.d();
  const auto fields = problem.fields(gas, N, accel);
  Eigen::MatrixXd V(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> e(d, 0.0);
    e[i] = 1.0;
    ControlForcing f(fields, problem.cutoff(), grid.nodes(), e);
    const LinearResult res = solve_linearized(f.sampler(), {}, grid, gas);
    for (std::size_t j = 0; j < d; ++j)
      V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          time_integral_at(res.history, problem.alphas[j]);
  }
  return V;
}

SuiteReport identity_suite(const ControlProblem& problem, const GasModel& gas,
                           const Numerics& numerics, const SuiteOptions& opts) {
  validate(problem);
  validate(gas);
  validate(numerics);
  require(opts.tolerance_scale > 0.0, ErrorKind::Config, "tolerance scale must be positive");
  for (const auto& g : opts.only)
    require(std::find(suite_groups().begin(), suite_groups().end(), g) != suite_groups().end(),
            ErrorKind::Config, "unknown check group '" + g + "'");
  const double s = opts.tolerance_scale;
  const std::size_t d = problem.d();
  SuiteReport rep;

  const bool need_gram = wanted(opts, "duality") || wanted(opts, "gram");
  GramReport gram;
  bool gram_ok = false;
  std::string gram_error;
  if (need_gram) {
    try {
      gram = gram_matrix(problem, gas, numerics.N, numerics.quad, numerics.accel);
      gram_ok = true;
    } catch (const Error& e) {
      gram_error = e.what();
    }
  }
  auto skip = [&](const std::string& group) {
    rep.checks.push_back({group, "all", CheckStatus::Skip, 0.0, 0.0, gram_error});
  };

  if (wanted(opts, "gram")) {
    if (!gram_ok) {
      skip("gram");
    } else {
      const double scale = std::max(gram.max_eigenvalue, 1e-300);
      rep.checks.push_back(check_le("gram", "symmetry", gram.asymmetry / scale,
                                    opts.gram_sym_tol * s, "raw |G - G^T| / lambda_max"));
      rep.checks.push_back(check_ge("gram", "positive_definite", gram.min_eigenvalue / scale,
                                    kDegeneracyTol, "lambda_min / lambda_max"));
      double worst = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
          const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
          worst = std::max(worst, gram.matrix(I, J) * gram.matrix(I, J) /
                                      (gram.matrix(I, I) * gram.matrix(J, J)));
        }
      rep.checks.push_back(check_le("gram", "cauchy_schwarz", worst, 1.0,
                                    "max G_ij^2 / (G_ii G_jj)"));
    }
  }

  if (wanted(opts, "duality")) {
    if (!gram_ok) {
      skip("duality");
    } else {
      try {
        const int M1 = opts.duality_M, M2 = 2 * opts.duality_M;
        const Eigen::MatrixXd V1 = duality_matrix(
            problem, gas, Grid::from_cfl(M1, problem.T, gas.c, numerics.cfl), numerics.N,
            numerics.accel);
        const Eigen::MatrixXd V2 = duality_matrix(
            problem, gas, Grid::from_cfl(M2, problem.T, gas.c, numerics.cfl), numerics.N,
            numerics.accel);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) {
            const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
            const double g = gram.matrix(I, J);
            const double e1 = std::abs(V1(I, J) - g) / std::abs(g);
            const double e2 = std::abs(V2(I, J) - g) / std::abs(g);
            char buf[128];
            std::snprintf(buf, sizeof buf, "M=%d: %.3e, M=%d: %.3e", M1, e1, M2, e2);
            rep.checks.push_back(
                check_le("duality", "rel_error" + ij(i, j), e1, opts.duality_tol * s, buf));
            rep.checks.push_back(check_ge("duality", "order" + ij(i, j), std::log2(e1 / e2),
                                          opts.duality_min_order, buf));
          }
      } catch (const Error& e) {
        rep.checks.push_back(failed("duality", "run", e));
      }
    }
  }

  if (wanted(opts, "linearization")) {
    try {
      const Grid grid = control_grid(problem, gas, numerics);
      const Eigen::MatrixXd V = duality_matrix(problem, gas, grid, numerics.N, numerics.accel);
      const auto fields = problem.fields(gas, numerics.N, numerics.accel);
      for (std::size_t i = 0; i < d; ++i) {
        std::vector<std::vector<double>> E(d);
        for (double eps : opts.ladder) {
          std::vector<double> e(d, 0.0);
          e[i] = eps;
          const ControlRun run = run_control(e, problem, gas, numerics, fields);
          for (std::size_t j = 0; j < d; ++j)
            E[j].push_back(std::abs((run.terminal[j] - problem.alphas[j]) / eps -
                                    V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        }
        for (std::size_t j = 0; j < d; ++j) {
          double worst = 0.0;
          std::string detail = "E:";
          for (std::size_t k = 0; k < E[j].size(); ++k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.3e", E[j][k]);
            detail += buf;
            if (k == 0) continue;
            // Zero forcing gives E == 0 exactly at every level.
            const double ratio = E[j][k - 1] > 0.0 ? E[j][k] / E[j][k - 1]
                                 : E[j][k] == 0.0  ? 0.0
                                                   : INFINITY;
            worst = std::max(worst, ratio);
          }
          rep.checks.push_back(check_le("linearization", "ratio" + ij(i, j), worst,
                                        opts.ladder_ratio, detail));
        }
      }
    } catch (const Error& e) {
      rep.checks.push_back(failed("linearization", "run", e));
    }
  }

  if (wanted(opts, "trig")) {
    for (int dd = 1; dd <= opts.trig_max_d; ++dd) {
      const auto cases = trig_batch(dd, opts.trig_cases, opts.seed);
      double worst = 0.0;
      for (const auto& c : cases) worst = std::max(worst, c.rel_error);
      rep.checks.push_back(check_le("trig", "d=" + std::to_string(dd), worst, opts.trig_tol * s,
                                    std::to_string(cases.size()) + " cases"));
    }
  }
  return rep;
}

void print_table(std::ostream& out, const SuiteReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %-18s %-5s %12s %12s  %s\n", "group", "check", "state",
                "measured", "tolerance", "detail");
  out << buf;
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%-14s %-18s %-5s %12.4e %12.4e  %s\n", c.group.c_str(),
                  c.name.c_str(), to_string(c.status), c.measured, c.tolerance, c.detail.c_str());
    out << buf;
  }
  out << (report.all_pass() ? "all checks passed\n" : "some checks FAILED\n");
}

}  // namespace lagctrl
