#pragma once

// Staggered semi-implicit finite differences on [0, pi]:
//   density-like unknowns (rho or eta) at the M cell centers,
//   velocities (u or v) at the M+1 nodes with u[0] = u[M] = 0.
// Viscosity is implicit (one tridiagonal solve per step); transport, pressure
// and forcing are explicit, with the pressure gradient taken from the freshly
// updated density.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagctrl/adjoint.hpp"
#include "lagctrl/problem.hpp"
#include "lagctrl/table.hpp"

namespace lagctrl {

struct Grid {
  int M = 512;
  double T = 1.0;
  double dt = 0.0;
  int steps = 0;

  double dx() const;
  double node(int j) const;
  double center(int i) const;
  std::vector<double> nodes() const;
  std::vector<double> centers() const;

  /// Uniform steps with dt <= cfl * dx / c (velocity headroom left to the
  /// per-step check, which uses SolverOptions::cfl_limit).
  static Grid from_cfl(int M, double T, double c, double cfl = 0.4);
  static Grid with_steps(int M, double T, int steps);
};

void validate(const Grid& grid);

struct SolverOptions {
  /// Advective CFL limit enforced at every step: dt <= cfl_limit * dx / (max|u| + c).
  double cfl_limit = 0.5;
  /// Nonlinear solver aborts with VacuumApproach when min rho drops below this.
  double positivity_floor = 0.1;
  bool keep_history = true;
};

struct FluidState {
  std::vector<double> rho;  // M cells
  std::vector<double> u;    // M+1 nodes
  double t = 0.0;
};

struct LinearState {
  std::vector<double> eta;  // M cells
  std::vector<double> v;    // M+1 nodes
  double t = 0.0;
};

/// Velocity snapshots u(t_k, x_j), k = 0..steps, j = 0..M.
struct FieldHistory {
  int M = 0;
  int steps = 0;
  double dt = 0.0;
  Table2D u;

  double T() const { return dt * steps; }
  double dx() const;
  double time(int k) const { return k * dt; }
  std::span<const double> snapshot(int k) const { return u.row(static_cast<std::size_t>(k)); }

  /// Sub-history of snapshots [k0, k1] re-based to start at t = 0.
  FieldHistory slice(int k0, int k1) const;
};

struct EnergyDiag {
  double sup_eta_l2 = 0.0;
  double sup_v_l2 = 0.0;
  double vx_l2_time = 0.0;   // (int_0^T ||v_x||^2 dt)^{1/2}
  double lhs = 0.0;          // sup(||eta|| + ||v||) + vx_l2_time
  double forcing_norm = 0.0; // ||f||_{L2} + ||g||_{L2}
  double ratio = 0.0;        // measured surrogate of C_T
  double max_mass_drift = 0.0;  // max_k |int eta dx - int_0^{t_k} int g| (exact: 0)
};

struct NonlinDiag {
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double max_mass_drift = 0.0;
  double min_rho = 1.0;
  double max_abs_u = 0.0;
  double sup_h1 = 0.0;         // sup_t (||rho - 1||_{H1} + ||u||_{H1})
  double ux_h1_time = 0.0;     // (int_0^T ||u_x||_{H1}^2 dt)^{1/2}
  double forcing_l2 = 0.0;     // ||f||_{L2((0,T) x (0,pi))}
  double ratio = 0.0;          // (sup_h1 + ux_h1_time) / forcing_l2
};

struct LinearResult {
  FieldHistory history;
  LinearState final_state;
  EnergyDiag diag;
};

struct NonlinearResult {
  FieldHistory history;
  FluidState final_state;
  NonlinDiag diag;
};

/// eta_t + v_x = g, v_t + c^2 eta_x = v_xx + f, zero data, v = 0 at both ends.
/// f is sampled at nodes, g at cell centers, both at mid-step times. g may be empty.
LinearResult solve_linearized(const ForcingSampler& f, const ForcingSampler& g, const Grid& grid,
                              const GasModel& gas, const SolverOptions& opts = {});

/// rho_t + (rho u)_x = 0, rho (u_t + u u_x) + p(rho)_x = u_xx + f from (rho, u) = (1, 0).
NonlinearResult solve_nonlinear(const ForcingSampler& f, const Grid& grid, const GasModel& gas,
                                const SolverOptions& opts = {});

/// int_0^T w(t, x) dt by the trapezoid rule over snapshots, w interpolated in x
/// with the monotone cubic used by the flow map.
double time_integral_at(const FieldHistory& history, double x);

/// Solves the tridiagonal system a_i y_{i-1} + b_i y_i + c_i y_{i+1} = d_i in place
/// (d is overwritten with y). a[0] and c[n-1] are ignored.
void solve_tridiagonal(std::span<const double> a, std::span<const double> b,
                       std::span<const double> c, std::span<double> d);

// ---- history export --------------------------------------------------------

/// CSV with header "t,x,value", every `stride`-th snapshot (the last one always).
void write_history_csv(const FieldHistory& history, const std::filesystem::path& path,
                       int stride = 1);

/// Binary snapshot format (little-endian):
///   char[4] "LCNS" | u32 version (=1) | u64 M | u64 steps | f64 dt |
///   (steps+1) * (M+1) f64 values, row-major by time step.
void write_history_binary(const FieldHistory& history, const std::filesystem::path& path);
FieldHistory read_history_binary(const std::filesystem::path& path);

inline constexpr std::uint32_t kHistoryFormatVersion = 1;

}  // namespace lagctrl
