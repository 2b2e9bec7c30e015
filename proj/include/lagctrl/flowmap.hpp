#pragma once

// Particle trajectories phi_t = u(t, phi), phi(0) = x0 replayed from a stored
// velocity history: classical RK4 in time, monotone cubic in space, linear
// blending between snapshots.

#include <filesystem>
#include <span>
#include <vector>

#include "lagctrl/pde.hpp"

namespace lagctrl {

struct IntegratorOptions {
  /// RK4 substeps per history interval (1 = substep equal to the PDE dt).
  int substeps = 1;
  /// Keep every position (false: only x0 and the terminal point).
  bool keep_trace = true;
};

struct FlowTrace {
  double x0 = 0.0;
  std::vector<double> times;
  std::vector<double> positions;
  double terminal = 0.0;
};

FlowTrace advect(const FieldHistory& history, double x0, const IntegratorOptions& opts = {});

/// Velocity at (t, x) as seen by the integrator.
double sample_velocity(const FieldHistory& history, double t, double x);

struct OrderReport {
  bool ordered = true;
  double min_gap = 0.0;
  std::vector<double> terminal;
};

/// Advects every probe (in parallel) and checks that terminal positions stay
/// strictly increasing. Probes must be strictly increasing.
OrderReport order_check(const FieldHistory& history, std::span<const double> probes,
                        const IntegratorOptions& opts = {});

/// n probes evenly spaced strictly inside (0, pi).
std::vector<double> probe_ladder(int n);

/// CSV with header "t,phi".
void write_trace_csv(const FlowTrace& trace, const std::filesystem::path& path);

}  // namespace lagctrl
