#include "lagctrl/flowmap.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "lagctrl/error.hpp"
#include "lagctrl/interp.hpp"

namespace lagctrl {

namespace {

constexpr double kPi = std::numbers::pi;

// u(t_k + theta dt, x) with 0 <= theta <= 1.
double blend(const FieldHistory& h, int k, double theta, double x) {
  const double dx = h.dx();
  const double a = monotone_cubic(h.snapshot(k), dx, x);
  if (theta == 0.0) return a;
  const double b = monotone_cubic(h.snapshot(k + 1), dx, x);
  return (1.0 - theta) * a + theta * b;
}

void check_history(const FieldHistory& h) {
  require(h.steps >= 1 && h.u.rows() == static_cast<std::size_t>(h.steps) + 1,
          ErrorKind::InvalidArgument, "flow map needs a complete velocity history");
}

double integrate(const FieldHistory& h, double x0, const IntegratorOptions& opts, FlowTrace* trace) {
  require(x0 >= 0.0 && x0 <= kPi, ErrorKind::OutOfDomain,
          "initial position " + std::to_string(x0) + " outside [0, pi]");
  require(opts.substeps >= 1, ErrorKind::InvalidArgument, "substeps must be >= 1");
  const int sub = opts.substeps;
  const double hs = h.dt / sub;
  double x = x0;
  if (trace) {
    trace->times.push_back(0.0);
    trace->positions.push_back(x0);
  }
  for (int k = 0; k < h.steps; ++k) {
    for (int s = 0; s < sub; ++s) {
      const double th0 = static_cast<double>(s) / sub;
      const double thm = (s + 0.5) / sub;
      const double th1 = static_cast<double>(s + 1) / sub;
      const double k1 = blend(h, k, th0, x);
      const double k2 = blend(h, k, thm, x + 0.5 * hs * k1);
      const double k3 = blend(h, k, thm, x + 0.5 * hs * k2);
      const double k4 = blend(h, k, th1, x + hs * k3);
      x += hs * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    if (!(x >= 0.0 && x <= kPi))
      throw Error(ErrorKind::OutOfDomain, "trajectory from " + std::to_string(x0) +
                                              " left [0, pi] at step " + std::to_string(k + 1));
    if (trace && opts.keep_trace) {
      trace->times.push_back(h.time(k + 1));
      trace->positions.push_back(x);
    }
  }
  if (trace && !opts.keep_trace) {
    trace->times.push_back(h.T());
    trace->positions.push_back(x);
  }
  return x;
}

}  // namespace

double sample_velocity(const FieldHistory& history, double t, double x) {
  check_history(history);
  require(t >= 0.0 && t <= history.T() * (1.0 + 1e-14), ErrorKind::OutOfDomain,
          "time outside the stored history");
  const double pos = std::min(t / history.dt, static_cast<double>(history.steps));
  int k = static_cast<int>(pos);
  if (k >= history.steps) k = history.steps - 1;
  return blend(history, k, pos - k, x);
}

FlowTrace advect(const FieldHistory& history, double x0, const IntegratorOptions& opts) {
  check_history(history);
  FlowTrace tr;
  tr.x0 = x0;
  tr.terminal = integrate(history, x0, opts, &tr);
  return tr;
}

OrderReport order_check(const FieldHistory& history, std::span<const double> probes,
                        const IntegratorOptions& opts) {
  check_history(history);
  for (std::size_t i = 1; i < probes.size(); ++i)
    require(probes[i] > probes[i - 1], ErrorKind::InvalidArgument,
            "order_check probes must be strictly increasing");
  OrderReport rep;
  rep.terminal.assign(probes.size(), 0.0);
  const long n = static_cast<long>(probes.size());
  IntegratorOptions quiet = opts;
  quiet.keep_trace = false;
  // Exceptions must not escape the parallel region.
  std::vector<int> failed(probes.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      rep.terminal[static_cast<std::size_t>(i)] =
          integrate(history, probes[static_cast<std::size_t>(i)], quiet, nullptr);
    } catch (const Error&) {
      failed[static_cast<std::size_t>(i)] = 1;
    }
  }
  for (std::size_t i = 0; i < failed.size(); ++i)
    if (failed[i])
      throw Error(ErrorKind::OutOfDomain, "probe " + std::to_string(probes[i]) + " left the domain");
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rep.terminal.size(); ++i) {
    const double gap = rep.terminal[i] - rep.terminal[i - 1];
    rep.min_gap = std::min(rep.min_gap, gap);
    if (!(gap > 0.0)) rep.ordered = false;
  }
  if (rep.terminal.size() < 2) rep.min_gap = 0.0;
  return rep;
}

std::vector<double> probe_ladder(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "probe ladder needs n >= 1");
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = kPi * (i + 1) / (n + 1);
  return p;
}

void write_trace_csv(const FlowTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out << "t,phi\n";
  char buf[64];
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", trace.times[k], trace.positions[k]);
    out << buf;
  }
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace lagctrl
