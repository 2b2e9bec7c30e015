#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lagctrl/control.hpp"
#include "lagctrl/verify.hpp"

using namespace lagctrl;

namespace {

// Coarse numerics so each forward run takes a few milliseconds.
Numerics fast() {
  Numerics n;
  n.M = 128;
  n.N = 512;
  n.quad.t_panels = 8;
  n.quad.x_panels = 8;
  n.probes = 16;
  return n;
}

ControlProblem shifted(double d1, double d2) {
  ControlProblem p;
  p.alphas = {0.3, 0.6};
  p.betas = {0.3 + d1, 0.6 + d2};
  return p;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("numerics validation") {
  Numerics n = fast();
  CHECK_NOTHROW(validate(n));
  n.cfl = 0.6;
  CHECK_THROWS_AS(validate(n), Error);
  n = fast();
  n.contraction = 1.0;
  CHECK_THROWS_AS(validate(n), Error);
  n = fast();
  n.quad.nodes = 0;
  try {
    validate(n);
    FAIL("expected Config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("zero amplitude fixes the points") {
  const ControlProblem p = shifted(0, 0);
  const std::vector<double> zero{0.0, 0.0};
  const auto th = theta(zero, p, GasModel{}, fast());
  CHECK(th[0] == p.alphas[0]);
  CHECK(th[1] == p.alphas[1]);
}

TEST_CASE("endpoint map is linear to second order") {
  // Against the same-grid duality matrix, |Theta(s e) - alpha - s D e| = O(s^2).
  ControlProblem p;
  p.alphas = {0.4};
  p.betas = {0.4};
  const GasModel gas;
  const Numerics n = fast();
  const Eigen::MatrixXd D = duality_matrix(p, gas, control_grid(p, gas, n), n.N, n.accel);
  double prev = 0.0;
  for (double s : {8.0, 4.0, 2.0}) {
    const std::vector<double> e{s};
    const double err = std::abs(theta(e, p, gas, n)[0] - p.alphas[0] - s * D(0, 0));
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("trivial target needs no iteration") {
  const SynthesisReport r = synthesize(shifted(0, 0), GasModel{}, fast());
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(max_abs(r.epsilon) == 0.0);
  CHECK(r.log.size() == 1);
  CHECK(r.order.ordered);
}

TEST_CASE("shooting converges for small displacements") {
  const GasModel gas;
  Numerics n = fast();
  const ControlProblem p = shifted(1e-3, -5e-4);
  std::ostringstream log;
  SynthesisOptions opts;
  opts.log = &log;
  const SynthesisReport r = synthesize(p, gas, n, opts);
  CHECK(r.converged);
  CHECK(r.iterations >= 1);
  CHECK(r.iterations <= 10);
  CHECK(max_abs(r.residual) <= n.tol_pos);
  CHECK(r.order.ordered);
  CHECK(r.flow.min_rho > 0.5);
  CHECK(r.log.size() == static_cast<std::size_t>(r.iterations) + 1);
  CHECK(log.str().rfind("iter 0 residual ", 0) == 0);
  CHECK(log.str().find("jacobian gram") != std::string::npos);

  const auto th = theta(r.epsilon, p, gas, n);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(th[i] - p.betas[i]) <= n.tol_pos);

  // Reversing the displacement reverses the amplitudes to first order.
  const SynthesisReport fwd = synthesize(shifted(2e-4, -1e-4), gas, n);
  const SynthesisReport back = synthesize(shifted(-2e-4, 1e-4), gas, n);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(std::abs(back.epsilon[i] + fwd.epsilon[i]) <= 0.05 * max_abs(fwd.epsilon));
}

TEST_CASE("amplitudes scale linearly with small displacements") {
  const GasModel gas;
  const Numerics n = fast();
  const SynthesisReport a = synthesize(shifted(2e-4, -1e-4), gas, n);
  const SynthesisReport b = synthesize(shifted(4e-4, -2e-4), gas, n);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(std::abs(b.epsilon[i] - 2.0 * a.epsilon[i]) <= 0.02 * max_abs(b.epsilon));
}

TEST_CASE("finite-difference Jacobian") {
  const GasModel gas;
  const Numerics n = fast();
  const ControlProblem p = shifted(0, 0);
  const auto fields = p.fields(gas, n.N, n.accel);
  const std::vector<double> zero{0.0, 0.0};
  const Eigen::MatrixXd J = fd_jacobian(zero, p, gas, n, fields);
  const Eigen::MatrixXd D = duality_matrix(p, gas, control_grid(p, gas, n), n.N, n.accel);
  // D(i, j) is the response at alpha_j to amplitude i; J(j, i) the same derivative.
  CHECK((J.transpose() - D).cwiseAbs().maxCoeff() <= 1e-6 * D.cwiseAbs().maxCoeff());
}

TEST_CASE("stalled iteration switches to the finite-difference Jacobian") {
  Numerics n = fast();
  n.contraction = 1e-12;  // every accepted step counts as non-contracting
  n.stall_limit = 1;
  n.tol_pos = 1e-10;
  std::ostringstream log;
  SynthesisOptions opts;
  opts.log = &log;
  const SynthesisReport r = synthesize(shifted(1e-3, -5e-4), GasModel{}, n, opts);
  CHECK(r.converged);
  CHECK(r.jacobian_source == JacobianSource::FiniteDifference);
  CHECK(log.str().find("jacobian fd") != std::string::npos);
  CHECK(max_abs(r.residual) <= 1e-10);
}

TEST_CASE("iteration cap reports divergence with the last state") {
  Numerics n = fast();
  n.max_iter = 1;
  n.tol_pos = 1e-15;
  try {
    synthesize(shifted(1e-3, -5e-4), GasModel{}, n);
    FAIL("expected SynthesisFailure");
  } catch (const SynthesisFailure& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().iterations == 1);
    CHECK(e.report().epsilon.size() == 2);
  }
}

TEST_CASE("displacements beyond the small-data regime fail cleanly") {
  Numerics n = fast();
  n.max_halvings = 4;
  n.max_iter = 6;
  try {
    synthesize(shifted(0.05, -0.05), GasModel{}, n);
    FAIL("expected a failure");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::Diverged || e.kind() == ErrorKind::AmplitudeTooLarge));
  }
}

TEST_CASE("iteration log formatting") {
  IterationLog entry;
  entry.iteration = 3;
  entry.residual_norm = 1.5e-7;
  entry.step_norm = 2.0;
  entry.damping = 1;
  entry.source = JacobianSource::FiniteDifference;
  CHECK(format_iteration(entry) == "iter 3 residual 1.500000e-07 step 2.000000e+00 damping 1 jacobian fd");
}
