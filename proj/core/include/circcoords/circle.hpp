#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace circcoords {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2π).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // -1e-17 + 2π rounds to 2π.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed difference a - b reduced to (-π, π].
inline double principal_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

/// Arc-length distance on the unit circle, in [0, π].
inline double circle_distance(double a, double b) {
  const double d = std::fabs(std::fmod(a - b, kTwoPi));
  return std::min(d, kTwoPi - d);
}

/// Euclidean distance between the points at angles a and b on the unit circle.
inline double chord_distance(double a, double b) {
  return 2.0 * std::fabs(std::sin(0.5 * (a - b)));
}

}  // namespace circcoords
