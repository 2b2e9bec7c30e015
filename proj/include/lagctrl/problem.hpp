#pragma once

#include <cstddef>
#include <vector>

#include "lagctrl/adjoint.hpp"

namespace lagctrl {

/// Barotropic pressure law p(rho) = (c^2 / gamma) rho^gamma, so that p'(1) = c^2.
/// Viscosity is fixed to 1.
struct GasModel {
  double c = 1.3;
  double gamma = 1.4;

  double pressure(double rho) const;
  double dpressure(double rho) const;
};

void validate(const GasModel& gas);

/// Source points alpha_i, targets beta_i, horizon T and control window omega
/// with cutoff margin eta.
struct ControlProblem {
  std::vector<double> alphas{0.3, 0.6};
  std::vector<double> betas{0.3, 0.6};
  double T = 2.0;
  double omega_lo = 1.5;
  double omega_hi = 2.5;
  double eta = 0.1;

  std::size_t d() const { return alphas.size(); }
  Cutoff cutoff() const { return {omega_lo, omega_hi, eta}; }

  /// One adjoint field per source point, sharing c, T, N and acceleration.
  std::vector<AdjointField> fields(const GasModel& gas, int N, bool accel = true) const;
};

void validate(const ControlProblem& problem);

}  // namespace lagctrl
