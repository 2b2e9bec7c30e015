#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <numbers>

#include "lagctrl/error.hpp"
#include "lagctrl/pde.hpp"
#include "support.hpp"

using namespace lagctrl;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

// Smooth bump supported inside (1.5, 2.5), switched on in time.
ForcingSampler bump(double amp) {
  return pointwise_forcing([amp](double t, double x) {
    if (x <= 1.5 || x >= 2.5) return 0.0;
    const double s = (x - 1.5) * (2.5 - x);
    return amp * std::sin(3.0 * t) * 16.0 * s * s;
  });
}

// Manufactured solution v = a t^2 sin x, eta = a t^2 cos x of the linearized system.
struct Manufactured {
  double c;
  double a = 0.1;
  double v(double t, double x) const { return a * t * t * std::sin(x); }
  double eta(double t, double x) const { return a * t * t * std::cos(x); }
  ForcingSampler f() const {
    return pointwise_forcing([c = c, a = a](double t, double x) {
      return a * (2 * t - c * c * t * t + t * t) * std::sin(x);
    });
  }
  ForcingSampler g() const {
    return pointwise_forcing([a = a](double t, double x) { return a * (2 * t + t * t) * std::cos(x); });
  }
};

double linear_error(int M, const GasModel& gas) {
  const Manufactured ms{gas.c};
  const Grid grid = Grid::from_cfl(M, 1.0, gas.c, 0.4);
  const LinearResult r = solve_linearized(ms.f(), ms.g(), grid, gas);
  double err = 0.0;
  for (int j = 0; j <= M; ++j)
    err = std::max(err, std::abs(r.final_state.v[static_cast<std::size_t>(j)] - ms.v(1.0, grid.node(j))));
  for (int i = 0; i < M; ++i)
    err = std::max(err, std::abs(r.final_state.eta[static_cast<std::size_t>(i)] - ms.eta(1.0, grid.center(i))));
  return err;
}

}  // namespace

TEST_CASE("tridiagonal solver matches a dense solve") {
  const int n = 9;
  std::vector<double> a(n), b(n), c(n), d(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    a[i] = -0.3 - 0.01 * i;
    c[i] = -0.7 + 0.02 * i;
    b[i] = 2.5 + 0.1 * std::sin(i);
    d[i] = std::cos(1.0 + i);
    A(i, i) = b[i];
    if (i > 0) A(i, i - 1) = a[i];
    if (i + 1 < n) A(i, i + 1) = c[i];
    rhs(i) = d[i];
  }
  const Eigen::VectorXd ref = A.partialPivLu().solve(rhs);
  solve_tridiagonal(a, b, c, d);
  for (int i = 0; i < n; ++i) CHECK(std::abs(d[i] - ref(i)) <= 1e-14);
}

TEST_CASE("grid construction") {
  const Grid g = Grid::from_cfl(128, 2.0, 1.3, 0.4);
  CHECK(g.dt <= 0.4 * g.dx() / 1.3 * (1 + 1e-14));
  CHECK(std::abs(g.dt * g.steps - 2.0) <= 1e-14);
  CHECK(g.node(128) == kPi);
  CHECK(g.nodes().size() == 129);
  CHECK(g.centers().size() == 128);
  CHECK_THROWS_AS(Grid::from_cfl(1, 1.0, 1.0), Error);
  CHECK_THROWS_AS(Grid::with_steps(8, 1.0, 0), Error);
}

TEST_CASE("zero forcing keeps the rest state exactly") {
  const GasModel gas;
  const Grid grid = Grid::from_cfl(64, 1.0, gas.c);
  const NonlinearResult nl = solve_nonlinear(nullptr, grid, gas);
  for (double r : nl.final_state.rho) CHECK(r == 1.0);
  for (double u : nl.final_state.u) CHECK(u == 0.0);
  CHECK(nl.diag.max_abs_u == 0.0);
  CHECK(nl.diag.ratio == 0.0);
  const LinearResult li = solve_linearized(nullptr, nullptr, grid, gas);
  for (double e : li.final_state.eta) CHECK(e == 0.0);
  for (double v : li.final_state.v) CHECK(v == 0.0);
  CHECK(li.history.u.rows() == static_cast<std::size_t>(grid.steps) + 1);
}

TEST_CASE("mass conservation") {
  const GasModel gas;
  const Grid grid = Grid::from_cfl(256, 2.0, gas.c);
  const NonlinearResult nl = solve_nonlinear(bump(0.1), grid, gas);
  CHECK(nl.diag.max_abs_u > 1e-3);
  CHECK(nl.diag.max_mass_drift <= 1e-12);
  CHECK(std::abs(nl.diag.mass_final - kPi) <= 1e-12);
  CHECK(nl.diag.min_rho < 1.0);

  const Manufactured ms{gas.c};
  const LinearResult li = solve_linearized(ms.f(), ms.g(), Grid::from_cfl(128, 1.0, gas.c), gas);
  CHECK(li.diag.max_mass_drift <= 1e-12);
  CHECK(li.diag.ratio > 0.0);
}

TEST_CASE("linearized solver converges to a manufactured solution") {
  const GasModel gas;
  const double e1 = linear_error(32, gas), e2 = linear_error(64, gas), e3 = linear_error(128, gas);
  CHECK(e1 / e2 >= 1.7);
  CHECK(e2 / e3 >= 1.7);
  CHECK(e3 <= 2e-3);
}

TEST_CASE("nonlinear solver self-convergence") {
  const GasModel gas;
  std::vector<std::vector<double>> finals;
  for (int M : {64, 128, 256, 512}) {
    const NonlinearResult r = solve_nonlinear(bump(0.1), Grid::from_cfl(M, 1.0, gas.c), gas);
    finals.push_back(r.final_state.u);
  }
  // Compare at the nodes shared with the coarsest grid.
  auto gap = [&](std::size_t a) {
    double m = 0.0;
    for (std::size_t j = 0; j <= 64; ++j) {
      const std::size_t ja = j * ((finals[a].size() - 1) / 64);
      const std::size_t jb = j * ((finals[a + 1].size() - 1) / 64);
      m = std::max(m, std::abs(finals[a][ja] - finals[a + 1][jb]));
    }
    return m;
  };
  const double g0 = gap(0), g1 = gap(1), g2 = gap(2);
  CHECK(g0 / g1 >= 1.6);
  CHECK(g1 / g2 >= 1.6);
}

TEST_CASE("nonlinear response is linear to second order") {
  const GasModel gas;
  const Grid grid = Grid::from_cfl(128, 1.0, gas.c);
  const LinearResult lin = solve_linearized(bump(1.0), nullptr, grid, gas);
  double prev = 0.0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const NonlinearResult nl = solve_nonlinear(bump(eps), grid, gas);
    double err = 0.0;
    for (std::size_t j = 0; j < lin.final_state.v.size(); ++j)
      err = std::max(err, std::abs(nl.final_state.u[j] - eps * lin.final_state.v[j]));
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("failure modes") {
  const GasModel gas;
  const Grid coarse = Grid::with_steps(32, 1.0, 4);
  CHECK(kind_of([&] { solve_nonlinear(nullptr, coarse, gas); }) == ErrorKind::CflViolation);
  CHECK(kind_of([&] { solve_linearized(nullptr, nullptr, coarse, gas); }) == ErrorKind::CflViolation);

  SolverOptions strict;
  strict.positivity_floor = 0.999;
  const Grid grid = Grid::from_cfl(64, 1.0, gas.c);
  CHECK(kind_of([&] { solve_nonlinear(bump(2.0), grid, gas, strict); }) == ErrorKind::VacuumApproach);

  const ForcingSampler nan_forcing = pointwise_forcing([](double, double) { return NAN; });
  CHECK(kind_of([&] { solve_nonlinear(nan_forcing, grid, gas); }) == ErrorKind::NonFiniteField);
}

TEST_CASE("history slicing and time integrals") {
  const GasModel gas;
  const Grid grid = Grid::from_cfl(64, 1.0, gas.c);
  const NonlinearResult r = solve_nonlinear(bump(0.1), grid, gas);
  const FieldHistory s = r.history.slice(3, 10);
  CHECK(s.steps == 7);
  for (std::size_t j = 0; j < s.u.cols(); ++j) CHECK(s.u(0, j) == r.history.u(3, j));
  CHECK_THROWS_AS(r.history.slice(5, 5), Error);

  FieldHistory flat;
  flat.M = 16;
  flat.steps = 10;
  flat.dt = 0.1;
  flat.u = Table2D(11, 17, 0.25);
  CHECK(time_integral_at(flat, 1.234) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("history export round trip") {
  const GasModel gas;
  const Grid grid = Grid::from_cfl(32, 0.5, gas.c);
  const NonlinearResult r = solve_nonlinear(bump(0.1), grid, gas);
  const auto dir = testing::scratch_dir("pde");

  write_history_binary(r.history, dir / "h.lcns");
  const FieldHistory back = read_history_binary(dir / "h.lcns");
  CHECK(back.M == r.history.M);
  CHECK(back.steps == r.history.steps);
  CHECK(back.dt == r.history.dt);
  bool same = true;
  for (std::size_t k = 0; k < back.u.data().size(); ++k)
    same = same && back.u.data()[k] == r.history.u.data()[k];
  CHECK(same);
  CHECK(std::filesystem::file_size(dir / "h.lcns") ==
        4 + 4 + 8 + 8 + 8 + 8 * back.u.data().size());

  write_history_csv(r.history, dir / "h.csv", 5);
  std::ifstream csv(dir / "h.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,x,value");
  std::size_t rows = 0;
  double last_t = -1.0;
  while (std::getline(csv, line)) {
    ++rows;
    last_t = std::stod(line.substr(0, line.find(',')));
  }
  const int kept = (grid.steps + 4) / 5 + (grid.steps % 5 != 0 ? 1 : 0);
  CHECK(rows == static_cast<std::size_t>(kept) * 33);
  CHECK(last_t == doctest::Approx(0.5).epsilon(1e-14));

  {
    std::ofstream bad(dir / "bad.lcns", std::ios::binary);
    bad << "NOPE";
  }
  CHECK(kind_of([&] { read_history_binary(dir / "bad.lcns"); }) == ErrorKind::Io);
  std::filesystem::resize_file(dir / "h.lcns", 100);
  CHECK(kind_of([&] { read_history_binary(dir / "h.lcns"); }) == ErrorKind::Io);
  CHECK(kind_of([&] { read_history_binary(dir / "missing.lcns"); }) == ErrorKind::Io);
}
