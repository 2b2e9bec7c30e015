#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace lagctrl {

namespace detail {

inline double pchip_interior_slope(double d0, double d1) {
  if (d0 * d1 <= 0.0) return 0.0;
  return 2.0 / (1.0 / d0 + 1.0 / d1);
}

// Shape-preserving three-point end slope on a uniform grid.
inline double pchip_end_slope(double d0, double d1) {
  double m = 0.5 * (3.0 * d0 - d1);
  if (m * d0 <= 0.0) return 0.0;
  if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) m = 3.0 * d0;
  return m;
}

inline double node_slope(std::span<const double> y, double h, std::size_t j) {
  const std::size_t n = y.size();
  if (n == 2) return (y[1] - y[0]) / h;
  if (j == 0) return pchip_end_slope((y[1] - y[0]) / h, (y[2] - y[1]) / h);
  if (j == n - 1) return pchip_end_slope((y[n - 1] - y[n - 2]) / h, (y[n - 2] - y[n - 3]) / h);
  return pchip_interior_slope((y[j] - y[j - 1]) / h, (y[j + 1] - y[j]) / h);
}

}  // namespace detail

/// Monotone (Fritsch-Carlson/PCHIP) cubic Hermite interpolation of samples y on
/// the uniform grid x_j = j h. Reproduces the samples exactly at the nodes.
inline double monotone_cubic(std::span<const double> y, double h, double x) {
  const std::size_t n = y.size();
  if (n == 1) return y[0];
  const double pos = std::clamp(x / h, 0.0, static_cast<double>(n - 1));
  std::size_t j = static_cast<std::size_t>(pos);
  if (j >= n - 1) j = n - 2;
  const double s = pos - static_cast<double>(j);
  if (s == 0.0) return y[j];
  const double m0 = detail::node_slope(y, h, j);
  const double m1 = detail::node_slope(y, h, j + 1);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y[j] + h10 * h * m0 + h01 * y[j + 1] + h11 * h * m1;
}

}  // namespace lagctrl
