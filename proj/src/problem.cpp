#include "lagctrl/problem.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lagctrl/error.hpp"

namespace lagctrl {

double GasModel::pressure(double rho) const {
  if (gamma == 1.0) return c * c * rho;
  return c * c / gamma * std::pow(rho, gamma);
}

double GasModel::dpressure(double rho) const {
  if (gamma == 1.0) return c * c;
  return c * c * std::pow(rho, gamma - 1.0);
}

void validate(const GasModel& gas) {
  require(gas.c > 0.0 && std::isfinite(gas.c), ErrorKind::InvalidArgument,
          "gas.c: sound speed must be > 0");
  require(gas.gamma >= 1.0 && std::isfinite(gas.gamma), ErrorKind::InvalidArgument,
          "gas.gamma: adiabatic exponent must be >= 1");
}

namespace {

void check_points(const std::vector<double>& pts, const char* name) {
  require(!pts.empty(), ErrorKind::InvalidArgument, std::string(name) + ": at least one point");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    require(pts[i] > 0.0 && pts[i] < 1.0, ErrorKind::InvalidArgument,
            std::string(name) + "[" + std::to_string(i) + "] = " + std::to_string(pts[i]) +
                " must lie in (0, 1)");
    if (i > 0)
      require(pts[i] > pts[i - 1], ErrorKind::InvalidArgument,
              std::string(name) + " must be strictly increasing");
  }
}

}  // namespace

void validate(const ControlProblem& p) {
  check_points(p.alphas, "problem.alphas");
  check_points(p.betas, "problem.betas");
  require(p.betas.size() == p.alphas.size(), ErrorKind::InvalidArgument,
          "problem.betas must have as many entries as problem.alphas");
  require(p.T > 0.0 && std::isfinite(p.T), ErrorKind::InvalidArgument, "problem.T must be > 0");
  require(p.omega_lo > 1.0 && p.omega_hi < std::numbers::pi && p.omega_lo < p.omega_hi,
          ErrorKind::InvalidArgument, "problem.omega must satisfy 1 < lo < hi < pi");
  require(p.eta > 0.0 && 2.0 * p.eta < p.omega_hi - p.omega_lo, ErrorKind::InvalidArgument,
          "problem.eta must satisfy 0 < 2 eta < |omega|");
}

std::vector<AdjointField> ControlProblem::fields(const GasModel& gas, int N, bool accel) const {
  std::vector<AdjointField> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back({a, gas.c, T, N, accel});
  return out;
}

}  // namespace lagctrl
