#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

#include "lagctrl/error.hpp"
#include "lagctrl/spectral.hpp"

using namespace lagctrl;

namespace {

using cld = std::complex<long double>;

// Divided difference by complex long-double arithmetic from the eigenvalues of A_n.
long double complex_kernel(int n, double c, double tau) {
  const long double nn = n;
  const long double disc = 1.0L - 4.0L * c * c / (nn * nn);
  const cld root = std::sqrt(cld(disc, 0.0L));
  const cld lam = -nn * nn / 2.0L - nn * nn / 2.0L * root;
  const cld mu = -nn * nn / 2.0L + nn * nn / 2.0L * root;
  return std::real((std::exp(mu * (long double)tau) - std::exp(lam * (long double)tau)) / (mu - lam));
}

Eigen::Matrix2d A(int n, double c) {
  Eigen::Matrix2d a;
  a << 0.0, c * n, -c * n, -double(n) * n;
  return a;
}

Eigen::Matrix2d to_eigen(const Block2& b) {
  Eigen::Matrix2d m;
  m << b[0][0], b[0][1], b[1][0], b[1][1];
  return m;
}

}  // namespace

TEST_CASE("eigen_pair branches") {
  const ModeEigen r = eigen_pair(2, 1.0);
  CHECK(r.branch == Branch::Resonant);
  CHECK(r.lambda == -2.0);
  CHECK(r.mu == -2.0);

  const ModeEigen o = eigen_pair(1, 1.0);
  CHECK(o.branch == Branch::Oscillatory);
  CHECK(o.lambda == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(o.mu == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(o.frequency == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));

  const ModeEigen d = eigen_pair(3, 1.0);
  CHECK(d.branch == Branch::Overdamped);
  CHECK(d.lambda == doctest::Approx((-9.0 - 3.0 * std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(d.mu == doctest::Approx((-9.0 + 3.0 * std::sqrt(5.0)) / 2).epsilon(1e-14));

  CHECK_THROWS_AS(eigen_pair(0, 1.0), Error);
  CHECK_THROWS_AS(eigen_pair(1, 0.0), Error);
}

TEST_CASE("trace and determinant identities") {
  for (double c : {0.3, 1.0, 1.3, 2.5, 7.1})
    for (int n = 1; n <= 40; ++n) {
      const ModeEigen e = eigen_pair(n, c);
      const double n2 = double(n) * n;
      double tr, det;
      if (e.branch == Branch::Oscillatory) {
        tr = 2.0 * e.lambda;
        det = e.lambda * e.lambda + e.frequency * e.frequency;
      } else {
        tr = e.lambda + e.mu;
        det = e.lambda * e.mu;
      }
      CHECK(std::abs(tr + n2) <= 1e-12 * n2);
      CHECK(std::abs(det - c * c * n2) <= 1e-12 * c * c * n2);
      CHECK(e.lambda <= e.mu);
      CHECK(e.mu < 0.0);
    }
}

TEST_CASE("mode_kernel examples") {
  CHECK(mode_kernel(2, 1.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  const double osc = std::exp(-0.5) * std::sin(std::sqrt(3.0) / 2) / (std::sqrt(3.0) / 2);
  CHECK(mode_kernel(1, 1.0, 1.0) == doctest::Approx(osc).epsilon(1e-15));
  CHECK(mode_kernel(1, 1.0, 1.0) == doctest::Approx((double)complex_kernel(1, 1.0, 1.0)).epsilon(1e-13));
  CHECK(mode_kernel(1, 1.0, 1.0) == doctest::Approx(0.53350719511469298).epsilon(1e-14));
  for (int n : {1, 2, 3, 50})
    for (double c : {0.5, 1.0, 1.3}) CHECK(mode_kernel(n, c, 0.0) == 0.0);
  CHECK_THROWS_AS(mode_kernel(1, 1.0, -0.1), Error);
}

TEST_CASE("mode_kernel matches complex divided difference") {
  for (double c : {0.35, 1.0, 1.3, 2.2, 4.75})
    for (int n = 1; n <= 60; ++n)
      for (double tau : {1e-3, 0.05, 0.3, 1.0, 2.0, 5.0}) {
        const ModeEigen e = eigen_pair(n, c);
        const double gap = e.branch == Branch::Oscillatory ? 2.0 * e.frequency : e.mu - e.lambda;
        if (gap * tau < 1e-3) continue;
        const double ref = (double)complex_kernel(n, c, tau);
        const double scale = std::max(std::abs(ref), 1e-6 * tau * std::exp(e.mu * tau));
        CHECK(std::abs(mode_kernel(n, c, tau) - ref) <= 1e-10 * scale);
      }
}

TEST_CASE("mode_kernel is bounded by tau") {
  for (double c : {0.2, 1.0, 1.3, 3.0})
    for (int n = 1; n <= 30; ++n)
      for (double tau = 0.0; tau <= 4.0; tau += 0.0625)
        CHECK(std::abs(mode_kernel(n, c, tau)) <= tau + 1e-15);
}

TEST_CASE("continuity across resonance") {
  for (double tau : {0.1, 1.0, 2.0}) {
    const double q = mode_kernel(2, 1.0, tau);
    double prev = INFINITY;
    for (int k = 4; k <= 8; ++k) {
      const double delta = std::pow(10.0, -k);
      const double err = std::max(std::abs(mode_kernel(2, 1.0 + delta, tau) - q),
                                  std::abs(mode_kernel(2, 1.0 - delta, tau) - q));
      CHECK(err <= 0.5 * delta);
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("near-resonant Taylor branch agrees with neighbours") {
  // Gap times tau straddles the switch-over threshold.
  const double tau = 1.0;
  for (double eps : {1e-15, 1e-14, 1e-13, 1e-12}) {
    const double a = mode_kernel(2, 1.0 + eps, tau);
    const double b = mode_kernel(2, 1.0, tau);
    CHECK(std::abs(a - b) <= 1e-10);
  }
  const SpectralTable tab(4, 1.0 + 1e-14);
  std::vector<double> row(4);
  tab.kernels(tau, row);
  CHECK(row[1] == doctest::Approx(mode_kernel(2, 1.0 + 1e-14, tau)).epsilon(1e-12));
}

TEST_CASE("mode_kernel_integral matches adaptive quadrature") {
  using boost::math::quadrature::gauss_kronrod;
  for (double c : {0.7, 1.0, 1.3})
    for (int n : {1, 2, 3, 7, 25})
      for (double tau : {0.2, 1.0, 2.0}) {
        const double ref = gauss_kronrod<double, 61>::integrate(
            [&](double s) { return mode_kernel(n, c, s); }, 0.0, tau, 10, 1e-14);
        CHECK(mode_kernel_integral(n, c, tau) == doctest::Approx(ref).epsilon(1e-11));
      }
}

TEST_CASE("semigroup block") {
  for (int n : {1, 2, 5})
    for (double c : {0.7, 1.0, 1.3}) {
      const Eigen::Matrix2d I = to_eigen(semigroup_block(n, c, 0.0));
      CHECK((I - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    }

  const Eigen::Matrix2d h = to_eigen(semigroup_block(1, 1.0, 0.25));
  const Eigen::Matrix2d f = to_eigen(semigroup_block(1, 1.0, 0.5));
  CHECK((h * h - f).cwiseAbs().maxCoeff() <= 1e-12 * f.cwiseAbs().maxCoeff());

  for (int n : {1, 2, 3, 4})
    for (double c : {0.6, 1.0, 1.3})
      for (double t : {0.1, 0.5, 1.0}) {
        const Eigen::Matrix2d ref = (-A(n, c) * t).exp();
        const Eigen::Matrix2d got = to_eigen(semigroup_block(n, c, t));
        CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
        const Eigen::Matrix2d back = to_eigen(adjoint_propagator(n, c, t));
        CHECK((back - (A(n, c) * t).exp()).cwiseAbs().maxCoeff() <= 1e-12);
        const double growth = got.cwiseAbs().maxCoeff() * back.cwiseAbs().maxCoeff();
        CHECK((back * got - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-14 * growth);
      }
}

TEST_CASE("spectral table matches pointwise kernels") {
  for (double c : {1.0, 1.3, 2.5}) {
    const SpectralTable tab(256, c);
    std::vector<double> row(256);
    for (double tau : {0.0, 1e-4, 0.3, 1.7}) {
      tab.kernels(tau, row);
      for (int n = 1; n <= 256; ++n) {
        const double ref = mode_kernel(n, c, tau);
        CHECK(std::abs(row[static_cast<std::size_t>(n - 1)] - ref) <=
              1e-13 * std::max(std::abs(ref), 1e-300) + 1e-300);
      }
    }
  }
}
