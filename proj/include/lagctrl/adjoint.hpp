#pragma once

// Adjoint control fields xi_i(t, x): the velocity component of the backward
// linearized system driven by a Dirac source at alpha_i, evaluated from its
// sine series
//
//   xi(t, x) = (2/pi) sum_{n>=1} sin(n alpha) k_n(T - t) sin(n x),
//
// together with the smooth cutoff chi_eta and the forcings f_i = chi_eta xi_i.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lagctrl/spectral.hpp"
#include "lagctrl/table.hpp"

namespace lagctrl {

struct AdjointField {
  double alpha = 0.3;
  double c = 1.0;
  double T = 1.0;
  int N = 2048;
  /// Sum the e^{-c^2 tau}/n^2 layer of the tail in closed form.
  bool accel = true;

  /// n0 = 2c when it is an integer (double eigenvalue of that mode).
  std::optional<int> resonant_mode() const;
};

void validate(const AdjointField& field);

struct Cutoff {
  double lo = 1.5;
  double hi = 2.5;
  double eta = 0.1;
};

void validate(const Cutoff& cutoff);

double xi_eval(const AdjointField& field, double t, double x);

/// Density component zeta(t, x) = (2/pi) sum n sin(n alpha) K_n(T - t) cos(n x),
/// plain truncated series (no tail acceleration).
double zeta_eval(const AdjointField& field, double t, double x);

/// Entry (k, l) = xi_eval(field, t_grid[k], x_grid[l]). Rows are evaluated in parallel.
Table2D xi_batch(const AdjointField& field, std::span<const double> t_grid,
                 std::span<const double> x_grid);

/// Serial reference for xi_batch; same arithmetic, no threading.
Table2D xi_batch_serial(const AdjointField& field, std::span<const double> t_grid,
                        std::span<const double> x_grid);

/// Smooth step built from exp(-1/s): exactly 0 outside (lo, hi), exactly 1 on
/// [lo + eta, hi - eta].
double chi_eval(const Cutoff& cutoff, double x);

double forcing_eval(const AdjointField& field, const Cutoff& cutoff, double t, double x);

/// Closed form of sum_{n>=1} sin(n a) sin(n x) / n^2 for a, x in [0, pi].
double sine_pair_sum(double a, double x);

/// Forcing sampler consumed by the PDE solvers: fills out[j] = f(t, x[j]).
using ForcingSampler =
    std::function<void(double t, std::span<const double> x, std::span<double> out)>;

/// Wraps a pointwise function f(t, x) as a sampler.
ForcingSampler pointwise_forcing(std::function<double(double, double)> f);

/// f(t, x) = chi_eta(x) sum_i eps_i xi_i(t, x) tabulated on a fixed node set.
/// The sine tables are built once; each call costs one kernel row plus one
/// dot product per node inside the control window.
class ControlForcing {
 public:
  ControlForcing(std::vector<AdjointField> fields, Cutoff cutoff, std::vector<double> nodes,
                 std::vector<double> eps);

  /// Parallel over nodes.
  void fill(double t, std::span<double> out) const;
  /// Serial reference.
  void fill_serial(double t, std::span<double> out) const;

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> amplitudes() const { return eps_; }
  std::size_t active_count() const { return active_.size(); }

  ForcingSampler sampler() const;

 private:
  struct Row {
    std::vector<double> coeff;
    double tail = 0.0;
  };
  Row row(double t) const;
  double node_value(const Row& r, std::size_t a) const;

  std::vector<AdjointField> fields_;
  Cutoff cutoff_;
  std::vector<double> nodes_;
  std::vector<double> eps_;
  SpectralTable table_;
  std::vector<std::size_t> active_;
  std::vector<double> chi_;
  Table2D sin_nx_;     // active x N
  Table2D sin_na_;     // d x N
  Table2D closed_;     // d x active
};

}  // namespace lagctrl
