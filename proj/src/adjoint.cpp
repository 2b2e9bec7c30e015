#include "lagctrl/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lagctrl/error.hpp"

namespace lagctrl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

// sum_{n>=1} cos(n y) / n^2 on [0, 2 pi].
double cos_sq_sum(double y) { return y * y / 4.0 - kPi * y / 2.0 + kPi * kPi / 6.0; }

void check_point(const AdjointField& f, double t, double x) {
  require(t >= 0.0 && t <= f.T, ErrorKind::OutOfDomain,
          "time " + std::to_string(t) + " outside [0, T]");
  require(x >= 0.0 && x <= kPi, ErrorKind::OutOfDomain,
          "position " + std::to_string(x) + " outside [0, pi]");
}

double tail_weight(const AdjointField& f, double tau) {
  return f.accel ? std::exp(-f.c * f.c * tau) : 0.0;
}

// b_n = sin(n alpha) (k_n(tau) - a / n^2), n = 1..N.
void series_coefficients(const SpectralTable& table, std::span<const double> sin_na, double tau,
                         double a, std::span<double> out) {
  table.kernels(tau, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    out[i] = sin_na[i] * (out[i] - a / (n * n));
  }
}

std::vector<double> sine_row(double x, int N) {
  std::vector<double> s(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) s[static_cast<std::size_t>(n - 1)] = std::sin(n * x);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool on_boundary(double x) { return x == 0.0 || x == kPi; }

template <bool Parallel>
Table2D xi_batch_impl(const AdjointField& field, std::span<const double> t_grid,
                      std::span<const double> x_grid) {
  validate(field);
  for (double t : t_grid) check_point(field, t, 0.0);
  for (double x : x_grid) check_point(field, field.T, x);

  const std::size_t N = static_cast<std::size_t>(field.N);
  const SpectralTable table(field.N, field.c);
  const auto sin_na = sine_row(field.alpha, field.N);
  Table2D sin_nx(x_grid.size(), N);
  std::vector<double> closed(x_grid.size());
  for (std::size_t l = 0; l < x_grid.size(); ++l) {
    const auto s = sine_row(x_grid[l], field.N);
    std::copy(s.begin(), s.end(), sin_nx.row(l).begin());
    closed[l] = sine_pair_sum(field.alpha, x_grid[l]);
  }

  Table2D out(t_grid.size(), x_grid.size());
  const long rows = static_cast<long>(t_grid.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (long k = 0; k < rows; ++k) {
    const double tau = field.T - t_grid[static_cast<std::size_t>(k)];
    if (tau == 0.0) continue;
    std::vector<double> b(N);
    const double a = tail_weight(field, tau);
    series_coefficients(table, sin_na, tau, a, b);
    auto dst = out.row(static_cast<std::size_t>(k));
    for (std::size_t l = 0; l < x_grid.size(); ++l) {
      if (on_boundary(x_grid[l])) continue;
      dst[l] = kTwoOverPi * (dot(b, sin_nx.row(l)) + a * closed[l]);
    }
  }
  return out;
}

}  // namespace

std::optional<int> AdjointField::resonant_mode() const {
  const double n0 = 2.0 * c;
  if (n0 == std::floor(n0) && n0 >= 1.0) return static_cast<int>(n0);
  return std::nullopt;
}

void validate(const AdjointField& f) {
  require(f.alpha > 0.0 && f.alpha < kPi, ErrorKind::InvalidArgument,
          "source point alpha must lie in (0, pi)");
  require(f.c > 0.0 && std::isfinite(f.c), ErrorKind::InvalidArgument, "sound speed must be > 0");
  require(f.T > 0.0 && std::isfinite(f.T), ErrorKind::InvalidArgument, "horizon T must be > 0");
  require(f.N >= 1, ErrorKind::InvalidArgument, "truncation order N must be >= 1");
}

void validate(const Cutoff& w) {
  require(w.lo < w.hi, ErrorKind::InvalidArgument, "control window must satisfy lo < hi");
  require(w.lo >= 0.0 && w.hi <= kPi, ErrorKind::InvalidArgument,
          "control window must lie inside [0, pi]");
  require(w.eta > 0.0 && 2.0 * w.eta < w.hi - w.lo, ErrorKind::InvalidArgument,
          "cutoff margin must satisfy 0 < 2 eta < |omega|");
}

double sine_pair_sum(double a, double x) {
  return 0.5 * (cos_sq_sum(std::abs(x - a)) - cos_sq_sum(x + a));
}

double xi_eval(const AdjointField& field, double t, double x) {
  validate(field);
  check_point(field, t, x);
  const double tau = field.T - t;
  if (tau == 0.0 || on_boundary(x)) return 0.0;
  const double a = tail_weight(field, tau);
  double s = 0.0;
  for (int n = 1; n <= field.N; ++n) {
    const double nd = n;
    const double k = mode_kernel(n, field.c, tau) - a / (nd * nd);
    s += std::sin(nd * field.alpha) * k * std::sin(nd * x);
  }
  if (field.accel) s += a * sine_pair_sum(field.alpha, x);
  return kTwoOverPi * s;
}

double zeta_eval(const AdjointField& field, double t, double x) {
  validate(field);
  check_point(field, t, x);
  const double tau = field.T - t;
  if (tau == 0.0) return 0.0;
  double s = 0.0;
  for (int n = 1; n <= field.N; ++n) {
    const double nd = n;
    s += nd * std::sin(nd * field.alpha) * mode_kernel_integral(n, field.c, tau) * std::cos(nd * x);
  }
  return kTwoOverPi * s;
}

Table2D xi_batch(const AdjointField& field, std::span<const double> t_grid,
                 std::span<const double> x_grid) {
  return xi_batch_impl<true>(field, t_grid, x_grid);
}

Table2D xi_batch_serial(const AdjointField& field, std::span<const double> t_grid,
                        std::span<const double> x_grid) {
  return xi_batch_impl<false>(field, t_grid, x_grid);
}

double chi_eval(const Cutoff& w, double x) {
  if (!(x > w.lo && x < w.hi)) return 0.0;
  const auto g = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const auto h = [&](double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return g(s) / (g(s) + g(1.0 - s));
  };
  return h((x - w.lo) / w.eta) * h((w.hi - x) / w.eta);
}

double forcing_eval(const AdjointField& field, const Cutoff& cutoff, double t, double x) {
  const double chi = chi_eval(cutoff, x);
  const double xi = xi_eval(field, t, x);
  return chi * xi;
}

ForcingSampler pointwise_forcing(std::function<double(double, double)> f) {
  return [f = std::move(f)](double t, std::span<const double> x, std::span<double> out) {
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = f(t, x[j]);
  };
}

ControlForcing::ControlForcing(std::vector<AdjointField> fields, Cutoff cutoff,
                               std::vector<double> nodes, std::vector<double> eps)
    : fields_(std::move(fields)),
      cutoff_(cutoff),
      nodes_(std::move(nodes)),
      eps_(std::move(eps)),
      table_((fields_.empty() ? 1 : fields_.front().N), (fields_.empty() ? 1.0 : fields_.front().c)) {
  require(!fields_.empty(), ErrorKind::InvalidArgument, "ControlForcing needs at least one field");
  require(eps_.size() == fields_.size(), ErrorKind::InvalidArgument,
          "one amplitude per adjoint field required");
  validate(cutoff_);
  const auto& f0 = fields_.front();
  for (const auto& f : fields_) {
    validate(f);
    require(f.c == f0.c && f.T == f0.T && f.N == f0.N && f.accel == f0.accel,
            ErrorKind::InvalidArgument, "adjoint fields must share c, T, N and accel");
  }
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double chi = chi_eval(cutoff_, nodes_[j]);
    if (chi > 0.0) {
      active_.push_back(j);
      chi_.push_back(chi);
    }
  }
  const std::size_t N = static_cast<std::size_t>(f0.N);
  sin_nx_ = Table2D(active_.size(), N);
  closed_ = Table2D(fields_.size(), active_.size());
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const auto s = sine_row(nodes_[active_[a]], f0.N);
    std::copy(s.begin(), s.end(), sin_nx_.row(a).begin());
  }
  sin_na_ = Table2D(fields_.size(), N);
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const auto s = sine_row(fields_[i].alpha, f0.N);
    std::copy(s.begin(), s.end(), sin_na_.row(i).begin());
    for (std::size_t a = 0; a < active_.size(); ++a)
      closed_(i, a) = sine_pair_sum(fields_[i].alpha, nodes_[active_[a]]);
  }
}

ControlForcing::Row ControlForcing::row(double t) const {
  const auto& f0 = fields_.front();
  const double tau = f0.T - t;
  const std::size_t N = static_cast<std::size_t>(f0.N);
  Row r;
  r.coeff.assign(N, 0.0);
  const double a = tail_weight(f0, tau);
  std::vector<double> k(N);
  table_.kernels(tau, k);
  for (std::size_t n = 0; n < N; ++n) {
    const double nd = static_cast<double>(n + 1);
    const double kn = k[n] - a / (nd * nd);
    double s = 0.0;
    for (std::size_t i = 0; i < fields_.size(); ++i) s += eps_[i] * sin_na_(i, n);
    r.coeff[n] = s * kn;
  }
  r.tail = a;
  return r;
}

double ControlForcing::node_value(const Row& r, std::size_t a) const {
  double closed = 0.0;
  for (std::size_t i = 0; i < fields_.size(); ++i) closed += eps_[i] * closed_(i, a);
  return chi_[a] * kTwoOverPi * (dot(r.coeff, sin_nx_.row(a)) + r.tail * closed);
}

void ControlForcing::fill(double t, std::span<double> out) const {
  require(out.size() == nodes_.size(), ErrorKind::InvalidArgument, "forcing buffer size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const double tau = fields_.front().T - t;
  require(tau >= 0.0, ErrorKind::OutOfDomain, "forcing requested beyond the horizon");
  if (tau == 0.0 || active_.empty()) return;
  const Row r = row(t);
  const long count = static_cast<long>(active_.size());
#pragma omp parallel for schedule(static)
  for (long a = 0; a < count; ++a)
    out[active_[static_cast<std::size_t>(a)]] = node_value(r, static_cast<std::size_t>(a));
}

void ControlForcing::fill_serial(double t, std::span<double> out) const {
  require(out.size() == nodes_.size(), ErrorKind::InvalidArgument, "forcing buffer size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const double tau = fields_.front().T - t;
  require(tau >= 0.0, ErrorKind::OutOfDomain, "forcing requested beyond the horizon");
  if (tau == 0.0 || active_.empty()) return;
  const Row r = row(t);
  for (std::size_t a = 0; a < active_.size(); ++a) out[active_[a]] = node_value(r, a);
}

ForcingSampler ControlForcing::sampler() const {
  return [this](double t, std::span<const double> x, std::span<double> out) {
    require(x.size() == nodes_.size(), ErrorKind::InvalidArgument,
            "ControlForcing sampled on a different node set");
    fill(t, out);
  };
}

}  // namespace lagctrl
