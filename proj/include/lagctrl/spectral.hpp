#pragma once

// Per-mode eigen-structure of the linearized acoustic-viscous operator on
// V_n = span{(cos nx, 0), (0, sin nx)}:
//
//   A_n = [[0, c n], [-c n, -n^2]],   trace -n^2,  det c^2 n^2.
//
// All quantities are real. The oscillatory pair lambda = re - i w, mu = re + i w
// is stored as (re, w).

#include <array>
#include <span>
#include <vector>

namespace lagctrl {

enum class Branch { Oscillatory, Resonant, Overdamped };

const char* to_string(Branch b);

struct ModeEigen {
  int n = 1;
  double c = 1.0;
  Branch branch = Branch::Resonant;
  /// Real parts. For Oscillatory both equal -n^2/2.
  double lambda = 0.0;
  double mu = 0.0;
  /// Imaginary magnitude w_n = n sqrt(c^2 - n^2/4) on the oscillatory branch, else 0.
  double frequency = 0.0;
};

ModeEigen eigen_pair(int n, double c);

/// Divided difference k_n(tau) = (e^{mu tau} - e^{lambda tau}) / (mu - lambda),
/// continued through the double eigenvalue by its limit tau e^{lambda tau}.
double mode_kernel(int n, double c, double tau);

/// Antiderivative K_n(tau) = int_0^tau k_n(s) ds.
double mode_kernel_integral(int n, double c, double tau);

using Block2 = std::array<std::array<double, 2>, 2>;

/// S_n(t) = exp(-A_n t) in the basis (Phi_2n, Phi_2n-1).
Block2 semigroup_block(int n, double c, double t);

/// exp(A_n s) = S_n(-s); the decaying propagator used by the backward adjoint.
Block2 adjoint_propagator(int n, double c, double s);

/// Relative width below which the divided difference switches to its Taylor form:
/// |mu - lambda| * tau < kNearResonance.
inline constexpr double kNearResonance = 1e-6;

/// Mode constants for n = 1..N, precomputed once so that the kernel row
/// {k_n(tau)} can be filled with one exponential per mode.
class SpectralTable {
 public:
  SpectralTable(int N, double c);

  int size() const { return static_cast<int>(modes_.size()); }
  double c() const { return c_; }

  /// out[n-1] = k_n(tau), n = 1..N.
  void kernels(double tau, std::span<double> out) const;

  struct Mode {
    double mid;      // -n^2/2
    double half_sq;  // ((mu - lambda)/2)^2, signed: < 0 oscillatory
    double gap;      // |mu - lambda| (2 w on the oscillatory branch)
    double mu;       // real upper eigenvalue (overdamped), stable form
  };
  const Mode& mode(int n) const { return modes_[static_cast<std::size_t>(n - 1)]; }

 private:
  double c_;
  std::vector<Mode> modes_;
};

}  // namespace lagctrl
