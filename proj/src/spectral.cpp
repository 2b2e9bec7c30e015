#include "lagctrl/spectral.hpp"

#include <cmath>

#include "lagctrl/error.hpp"

namespace lagctrl {

const char* to_string(Branch b) {
  switch (b) {
    case Branch::Oscillatory: return "oscillatory";
    case Branch::Resonant: return "resonant";
    case Branch::Overdamped: return "overdamped";
  }
  return "unknown";
}

namespace {

void check_mode(int n, double c) {
  require(n >= 1, ErrorKind::InvalidArgument, "mode index must be >= 1");
  require(c > 0.0 && std::isfinite(c), ErrorKind::InvalidArgument, "sound speed must be positive");
}

SpectralTable::Mode make_mode(int n, double c) {
  const double nd = n;
  const double nn = nd * nd;
  SpectralTable::Mode m{};
  m.mid = -0.5 * nn;
  // (n - 2c)(n + 2c) keeps the sign and relative accuracy next to resonance.
  m.half_sq = 0.25 * nn * (nd - 2.0 * c) * (nd + 2.0 * c);
  m.gap = 2.0 * std::sqrt(std::abs(m.half_sq));
  if (m.half_sq > 0.0) {
    const double s = m.gap / nn;  // sqrt(1 - 4c^2/n^2)
    m.mu = -2.0 * c * c / (1.0 + s);
  } else {
    m.mu = m.mid;
  }
  return m;
}

double kernel(const SpectralTable::Mode& m, double tau) {
  if (tau == 0.0) return 0.0;
  if (m.gap * tau < kNearResonance) {
    const double z = m.half_sq * tau * tau;
    return std::exp(m.mid * tau) * tau * (1.0 + z / 6.0 + z * z / 120.0);
  }
  if (m.half_sq < 0.0) {
    const double w = 0.5 * m.gap;
    return std::exp(m.mid * tau) * std::sin(w * tau) / w;
  }
  return std::exp(m.mu * tau) * (-std::expm1(-m.gap * tau)) / m.gap;
}

// exp(A_n s) = e^{mid s} [cosh(h s) I + sinh(h s)/h (A_n - mid I)], h^2 = half_sq.
Block2 propagator(int n, double c, double s) {
  const auto m = make_mode(n, c);
  const double nn = static_cast<double>(n) * n;
  const double cn = c * n;
  double e0 = 0.0;  // e^{mid s} cosh(h s)
  double e1 = 0.0;  // e^{mid s} sinh(h s) / h
  if (m.gap * std::abs(s) < kNearResonance) {
    const double y = m.half_sq * s * s;
    const double em = std::exp(m.mid * s);
    e0 = em * (1.0 + y / 2.0 + y * y / 24.0);
    e1 = em * s * (1.0 + y / 6.0 + y * y / 120.0);
  } else if (m.half_sq < 0.0) {
    const double w = 0.5 * m.gap;
    const double em = std::exp(m.mid * s);
    e0 = em * std::cos(w * s);
    e1 = em * std::sin(w * s) / w;
  } else if (s >= 0.0) {
    const double emu = std::exp(m.mu * s);
    e0 = 0.5 * emu * (1.0 + std::exp(-m.gap * s));
    e1 = emu * (-std::expm1(-m.gap * s)) / m.gap;
  } else {
    const double lambda = m.mid - 0.5 * m.gap;
    const double elam = std::exp(lambda * s);
    e0 = 0.5 * elam * (1.0 + std::exp(m.gap * s));
    e1 = elam * std::expm1(m.gap * s) / m.gap;
  }
  Block2 out{};
  out[0][0] = e0 + 0.5 * nn * e1;
  out[0][1] = cn * e1;
  out[1][0] = -cn * e1;
  out[1][1] = e0 - 0.5 * nn * e1;
  return out;
}

}  // namespace

ModeEigen eigen_pair(int n, double c) {
  check_mode(n, c);
  const auto m = make_mode(n, c);
  ModeEigen e;
  e.n = n;
  e.c = c;
  if (m.half_sq == 0.0) {
    e.branch = Branch::Resonant;
    e.lambda = e.mu = m.mid;
  } else if (m.half_sq < 0.0) {
    e.branch = Branch::Oscillatory;
    e.lambda = e.mu = m.mid;
    e.frequency = 0.5 * m.gap;
  } else {
    e.branch = Branch::Overdamped;
    e.mu = m.mu;
    e.lambda = m.mid - 0.5 * m.gap;
  }
  return e;
}

double mode_kernel(int n, double c, double tau) {
  check_mode(n, c);
  require(tau >= 0.0, ErrorKind::InvalidArgument, "mode_kernel requires tau >= 0");
  return kernel(make_mode(n, c), tau);
}

double mode_kernel_integral(int n, double c, double tau) {
  check_mode(n, c);
  require(tau >= 0.0, ErrorKind::InvalidArgument, "mode_kernel_integral requires tau >= 0");
  if (tau == 0.0) return 0.0;
  // int_0^tau exp(A s) ds = A^{-1} (exp(A tau) - I); the (1,2) entry equals c n K_n(tau).
  const auto e = propagator(n, c, tau);
  const double nn = static_cast<double>(n) * n;
  const double cn = c * n;
  const double det = cn * cn;
  return (-nn * e[0][1] - cn * (e[1][1] - 1.0)) / (det * cn);
}

Block2 semigroup_block(int n, double c, double t) {
  check_mode(n, c);
  require(t >= 0.0, ErrorKind::InvalidArgument, "semigroup_block requires t >= 0");
  return propagator(n, c, -t);
}

Block2 adjoint_propagator(int n, double c, double s) {
  check_mode(n, c);
  require(s >= 0.0, ErrorKind::InvalidArgument, "adjoint_propagator requires s >= 0");
  return propagator(n, c, s);
}

SpectralTable::SpectralTable(int N, double c) : c_(c) {
  check_mode(N, c);
  modes_.reserve(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) modes_.push_back(make_mode(n, c));
}

void SpectralTable::kernels(double tau, std::span<double> out) const {
  require(out.size() >= modes_.size(), ErrorKind::InvalidArgument, "kernel row too short");
  for (std::size_t i = 0; i < modes_.size(); ++i) out[i] = kernel(modes_[i], tau);
}

}  // namespace lagctrl
