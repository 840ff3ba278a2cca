#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace mf {

/// Compensated (Kahan) summation; keeps probability-mass checks honest for
/// empirical supports with thousands of points.
inline double kahan_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

inline bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace mf
