#include "lagctrl/pde.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "lagctrl/error.hpp"
#include "lagctrl/interp.hpp"

namespace lagctrl {

namespace {

constexpr double kPi = std::numbers::pi;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double l2_sq(std::span<const double> v, double dx) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s * dx;
}

// sum_i ((v_{i+1} - v_i)/dx)^2 dx
double diff_l2_sq(std::span<const double> v, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double d = (v[i + 1] - v[i]) / dx;
    s += d * d;
  }
  return s * dx;
}

// sum over interior nodes of the second difference squared, times dx.
double second_diff_l2_sq(std::span<const double> v, double dx) {
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < v.size(); ++j) {
    const double d = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dx * dx);
    s += d * d;
  }
  return s * dx;
}

double kahan_sum(std::span<const double> v) {
  double s = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

void check_cfl(const Grid& grid, const GasModel& gas, const SolverOptions& opts,
               std::span<const double> u, double t) {
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, std::abs(x));
  const double limit = opts.cfl_limit * grid.dx() / (umax + gas.c);
  if (grid.dt > limit)
    throw Error(ErrorKind::CflViolation, "dt = " + std::to_string(grid.dt) + " exceeds " +
                                             std::to_string(limit) + " at t = " + std::to_string(t));
}

FieldHistory make_history(const Grid& grid, bool keep) {
  FieldHistory h;
  h.M = grid.M;
  h.steps = grid.steps;
  h.dt = grid.dt;
  if (keep)
    h.u = Table2D(static_cast<std::size_t>(grid.steps) + 1, static_cast<std::size_t>(grid.M) + 1);
  return h;
}

void store(FieldHistory& h, int k, std::span<const double> u) {
  if (h.u.rows() == 0) return;
  std::copy(u.begin(), u.end(), h.u.row(static_cast<std::size_t>(k)).begin());
}

// Implicit viscosity operator (I - dt * diag(1/w) D2) on interior nodes 1..M-1,
// with per-node weight w (1 for the linear system, face density otherwise).
// rhs holds the interior right-hand side and receives the solution.
void implicit_viscosity(std::span<const double> weight, double r, std::span<double> rhs,
                        std::vector<double>& a, std::vector<double>& b, std::vector<double>& c) {
  const std::size_t n = rhs.size();
  a.resize(n);
  b.resize(n);
  c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ri = r / weight[i];
    a[i] = -ri;
    b[i] = 1.0 + 2.0 * ri;
    c[i] = -ri;
  }
  solve_tridiagonal(a, b, c, rhs);
}

}  // namespace

double Grid::dx() const { return kPi / M; }
double Grid::node(int j) const { return j == M ? kPi : j * dx(); }
double Grid::center(int i) const { return (i + 0.5) * dx(); }

std::vector<double> Grid::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(M) + 1);
  for (int j = 0; j <= M; ++j) x[static_cast<std::size_t>(j)] = node(j);
  return x;
}

std::vector<double> Grid::centers() const {
  std::vector<double> x(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) x[static_cast<std::size_t>(i)] = center(i);
  return x;
}

Grid Grid::from_cfl(int M, double T, double c, double cfl) {
  require(M >= 2, ErrorKind::InvalidArgument, "grid needs M >= 2 cells");
  require(T > 0.0 && c > 0.0 && cfl > 0.0, ErrorKind::InvalidArgument,
          "grid needs T, c and cfl > 0");
  const double dt_max = cfl * (kPi / M) / c;
  const int steps = static_cast<int>(std::ceil(T / dt_max - 1e-12));
  return with_steps(M, T, std::max(steps, 1));
}

Grid Grid::with_steps(int M, double T, int steps) {
  Grid g;
  g.M = M;
  g.T = T;
  g.steps = steps;
  g.dt = T / steps;
  validate(g);
  return g;
}

void validate(const Grid& g) {
  require(g.M >= 2, ErrorKind::InvalidArgument, "grid needs M >= 2 cells");
  require(g.steps >= 1 && g.dt > 0.0, ErrorKind::InvalidArgument, "grid needs steps >= 1");
  require(std::abs(g.dt * g.steps - g.T) <= 1e-12 * g.T, ErrorKind::InvalidArgument,
          "grid must satisfy steps * dt = T");
}

double FieldHistory::dx() const { return kPi / M; }

FieldHistory FieldHistory::slice(int k0, int k1) const {
  require(0 <= k0 && k0 < k1 && k1 <= steps, ErrorKind::InvalidArgument, "bad history slice");
  FieldHistory h;
  h.M = M;
  h.steps = k1 - k0;
  h.dt = dt;
  h.u = Table2D(static_cast<std::size_t>(h.steps) + 1, static_cast<std::size_t>(M) + 1);
  for (int k = k0; k <= k1; ++k) {
    const auto src = snapshot(k);
    std::copy(src.begin(), src.end(), h.u.row(static_cast<std::size_t>(k - k0)).begin());
  }
  return h;
}

void solve_tridiagonal(std::span<const double> a, std::span<const double> b,
                       std::span<const double> c, std::span<double> d) {
  const std::size_t n = d.size();
  if (n == 0) return;
  std::vector<double> cp(n);
  double denom = b[0];
  cp[0] = c[0] / denom;
  d[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = b[i] - a[i] * cp[i - 1];
    cp[i] = c[i] / denom;
    d[i] = (d[i] - a[i] * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
}

LinearResult solve_linearized(const ForcingSampler& f, const ForcingSampler& g, const Grid& grid,
                              const GasModel& gas, const SolverOptions& opts) {
  validate(grid);
  validate(gas);
  const int M = grid.M;
  const double dx = grid.dx();
  const double dt = grid.dt;
  const double c2 = gas.c * gas.c;
  const double r = dt / (dx * dx);
  const auto xn = grid.nodes();
  const auto xc = grid.centers();

  LinearResult res;
  res.history = make_history(grid, opts.keep_history);
  auto& eta = res.final_state.eta;
  auto& v = res.final_state.v;
  eta.assign(static_cast<std::size_t>(M), 0.0);
  v.assign(static_cast<std::size_t>(M) + 1, 0.0);
  store(res.history, 0, v);

  std::vector<double> fs(xn.size(), 0.0), gs(xc.size(), 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(M) - 1);
  std::vector<double> ones(rhs.size(), 1.0), ta, tb, tc;
  double f_sq = 0.0, g_sq = 0.0, vx_sq_time = 0.0, injected = 0.0;
  auto& dg = res.diag;

  for (int k = 0; k < grid.steps; ++k) {
    const double t = k * dt;
    check_cfl(grid, gas, opts, v, t);
    const double tm = t + 0.5 * dt;
    if (f) f(tm, xn, fs);
    if (g) g(tm, xc, gs);
    fs.front() = fs.back() = 0.0;

    for (int i = 0; i < M; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      eta[iu] += dt * (gs[iu] - (v[iu + 1] - v[iu]) / dx);
    }
    for (int j = 1; j < M; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      rhs[ju - 1] = v[ju] + dt * (fs[ju] - c2 * (eta[ju] - eta[ju - 1]) / dx);
    }
    implicit_viscosity(ones, r, rhs, ta, tb, tc);
    std::copy(rhs.begin(), rhs.end(), v.begin() + 1);

    if (!all_finite(v) || !all_finite(eta))
      throw Error(ErrorKind::NonFiniteField, "linearized solver produced NaN/Inf at t = " +
                                                 std::to_string(t + dt));
    store(res.history, k + 1, v);

    f_sq += l2_sq(fs, dx) * dt;
    g_sq += l2_sq(gs, dx) * dt;
    injected += kahan_sum(gs) * dx * dt;
    vx_sq_time += diff_l2_sq(v, dx) * dt;
    dg.sup_eta_l2 = std::max(dg.sup_eta_l2, std::sqrt(l2_sq(eta, dx)));
    dg.sup_v_l2 = std::max(dg.sup_v_l2, std::sqrt(l2_sq(v, dx)));
    const double sum_now = std::sqrt(l2_sq(eta, dx)) + std::sqrt(l2_sq(v, dx));
    dg.lhs = std::max(dg.lhs, sum_now);
    dg.max_mass_drift = std::max(dg.max_mass_drift, std::abs(kahan_sum(eta) * dx - injected));
  }
  res.final_state.t = grid.T;
  dg.vx_l2_time = std::sqrt(vx_sq_time);
  dg.lhs += dg.vx_l2_time;
  dg.forcing_norm = std::sqrt(f_sq) + std::sqrt(g_sq);
  dg.ratio = dg.forcing_norm > 0.0 ? dg.lhs / dg.forcing_norm : 0.0;
  return res;
}

NonlinearResult solve_nonlinear(const ForcingSampler& f, const Grid& grid, const GasModel& gas,
                                const SolverOptions& opts) {
  validate(grid);
  validate(gas);
  const int M = grid.M;
  const double dx = grid.dx();
  const double dt = grid.dt;
  const double r = dt / (dx * dx);
  const auto xn = grid.nodes();

  NonlinearResult res;
  res.history = make_history(grid, opts.keep_history);
  auto& rho = res.final_state.rho;
  auto& u = res.final_state.u;
  rho.assign(static_cast<std::size_t>(M), 1.0);
  u.assign(static_cast<std::size_t>(M) + 1, 0.0);
  store(res.history, 0, u);

  auto& dg = res.diag;
  dg.mass_initial = kahan_sum(rho) * dx;
  dg.min_rho = 1.0;

  std::vector<double> fs(xn.size(), 0.0), flux(xn.size(), 0.0), pr(rho.size());
  std::vector<double> rhs(static_cast<std::size_t>(M) - 1), face(rhs.size()), ta, tb, tc;
  double f_sq = 0.0, ux_h1_sq_time = 0.0;

  const auto h1_state = [&]() {
    std::vector<double> dev(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) dev[i] = rho[i] - 1.0;
    const double rho_h1 = std::sqrt(l2_sq(dev, dx) + diff_l2_sq(dev, dx));
    const double u_h1 = std::sqrt(l2_sq(u, dx) + diff_l2_sq(u, dx));
    return rho_h1 + u_h1;
  };

  for (int k = 0; k < grid.steps; ++k) {
    const double t = k * dt;
    check_cfl(grid, gas, opts, u, t);
    if (f) f(t + 0.5 * dt, xn, fs);
    fs.front() = fs.back() = 0.0;

    // Mass: upwind flux rho u through interior nodes, zero through the walls.
    flux.front() = flux.back() = 0.0;
    for (int j = 1; j < M; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      flux[ju] = u[ju] * (u[ju] > 0.0 ? rho[ju - 1] : rho[ju]);
    }
    for (int i = 0; i < M; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      rho[iu] -= dt / dx * (flux[iu + 1] - flux[iu]);
    }
    for (std::size_t i = 0; i < rho.size(); ++i) pr[i] = gas.pressure(rho[i]);

    // Momentum at interior nodes, divided by the face density.
    for (int j = 1; j < M; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double rf = 0.5 * (rho[ju - 1] + rho[ju]);
      const double conv =
          u[ju] * (u[ju] > 0.0 ? (u[ju] - u[ju - 1]) : (u[ju + 1] - u[ju])) / dx;
      face[ju - 1] = rf;
      rhs[ju - 1] = u[ju] + dt * (-conv + (fs[ju] - (pr[ju] - pr[ju - 1]) / dx) / rf);
    }
    implicit_viscosity(face, r, rhs, ta, tb, tc);
    std::copy(rhs.begin(), rhs.end(), u.begin() + 1);

    if (!all_finite(u) || !all_finite(rho))
      throw Error(ErrorKind::NonFiniteField,
                  "nonlinear solver produced NaN/Inf at t = " + std::to_string(t + dt));
    const double rmin = *std::min_element(rho.begin(), rho.end());
    dg.min_rho = std::min(dg.min_rho, rmin);
    if (rmin < opts.positivity_floor)
      throw Error(ErrorKind::VacuumApproach, "min density " + std::to_string(rmin) +
                                                 " below floor at t = " + std::to_string(t + dt));
    store(res.history, k + 1, u);

    const double mass = kahan_sum(rho) * dx;
    dg.max_mass_drift = std::max(dg.max_mass_drift, std::abs(mass - dg.mass_initial));
    for (double x : u) dg.max_abs_u = std::max(dg.max_abs_u, std::abs(x));
    dg.sup_h1 = std::max(dg.sup_h1, h1_state());
    ux_h1_sq_time += (diff_l2_sq(u, dx) + second_diff_l2_sq(u, dx)) * dt;
    f_sq += l2_sq(fs, dx) * dt;
  }
  res.final_state.t = grid.T;
  dg.mass_final = kahan_sum(rho) * dx;
  dg.ux_h1_time = std::sqrt(ux_h1_sq_time);
  dg.forcing_l2 = std::sqrt(f_sq);
  dg.ratio = dg.forcing_l2 > 0.0 ? (dg.sup_h1 + dg.ux_h1_time) / dg.forcing_l2 : 0.0;
  return res;
}

double time_integral_at(const FieldHistory& history, double x) {
  require(history.u.rows() == static_cast<std::size_t>(history.steps) + 1, ErrorKind::InvalidArgument,
          "history has no stored snapshots");
  const double h = history.dx();
  double s = 0.0;
  for (int k = 0; k <= history.steps; ++k) {
    const double w = (k == 0 || k == history.steps) ? 0.5 : 1.0;
    s += w * monotone_cubic(history.snapshot(k), h, x);
  }
  return s * history.dt;
}

void write_history_csv(const FieldHistory& history, const std::filesystem::path& path, int stride) {
  require(stride >= 1, ErrorKind::InvalidArgument, "CSV stride must be >= 1");
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out << "t,x,value\n";
  char buf[96];
  const double h = history.dx();
  for (int k = 0; k <= history.steps; ++k) {
    if (k % stride != 0 && k != history.steps) continue;
    const auto row = history.snapshot(k);
    for (int j = 0; j <= history.M; ++j) {
      const double x = j == history.M ? kPi : j * h;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", history.time(k), x,
                    row[static_cast<std::size_t>(j)]);
      out << buf;
    }
  }
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

namespace {

template <class T>
void put(std::ofstream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return value;
}

}  // namespace

void write_history_binary(const FieldHistory& history, const std::filesystem::path& path) {
  require(history.u.rows() == static_cast<std::size_t>(history.steps) + 1, ErrorKind::InvalidArgument,
          "history has no stored snapshots");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out.write("LCNS", 4);
  put<std::uint32_t>(out, kHistoryFormatVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(history.M));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(history.steps));
  put<double>(out, history.dt);
  const auto data = history.u.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

FieldHistory read_history_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  require(in && std::memcmp(magic, "LCNS", 4) == 0, ErrorKind::Io, "bad magic in " + path.string());
  const auto version = get<std::uint32_t>(in);
  require(version == kHistoryFormatVersion, ErrorKind::Io,
          "unsupported history version " + std::to_string(version));
  FieldHistory h;
  h.M = static_cast<int>(get<std::uint64_t>(in));
  h.steps = static_cast<int>(get<std::uint64_t>(in));
  h.dt = get<double>(in);
  require(in && h.M >= 1 && h.steps >= 1, ErrorKind::Io, "corrupt header in " + path.string());
  h.u = Table2D(static_cast<std::size_t>(h.steps) + 1, static_cast<std::size_t>(h.M) + 1);
  auto data = h.u.data();
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  require(static_cast<bool>(in), ErrorKind::Io, "truncated payload in " + path.string());
  return h;
}

}  // namespace lagctrl
