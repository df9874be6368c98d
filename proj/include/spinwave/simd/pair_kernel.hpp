#pragma once

#include <cmath>

#include "spinwave/vec3.hpp"

namespace spinwave::simd {

/// Angular-averaged dipole radiation kernel for a pair at dimensionless
/// separation x (= k_eg r) with all dipoles along the unit axis n:
///   f = 3/2 [ (1 - c^2) j0(x) - (1 - 3c^2) j1(x)/x ]
///   g = 3/2 [ (1 - c^2) y0(x) - (1 - 3c^2) y1(x)/x ]
/// with c = n . x / |x|. f is the decay (real) part, g its dispersive partner.
struct PairKernelValue {
  double f;
  double g;
};

/// Pairs closer than this (dimensionless k r) keep only the real kernel.
inline constexpr double kNearZone = 1e-3;

/// Below this the radial functions switch to their Taylor series.
inline constexpr double kSeriesThreshold = 0.5;

/// j0(x) and j1(x)/x for x < kSeriesThreshold.
inline void radial_series(double x, double& j0, double& j1_over_x) {
  const double x2 = x * x;
  double term0 = 1.0;        // (-1)^k x^{2k} / (2k+1)!
  double term1 = 1.0 / 3.0;  // (-1)^k (2k+2) x^{2k} / (2k+3)!
  j0 = 0.0;
  j1_over_x = 0.0;
  for (int k = 0; k < 9; ++k) {
    j0 += term0;
    j1_over_x += term1;
    const double a = 2.0 * k + 2.0;
    const double b = 2.0 * k + 3.0;
    term0 *= -x2 / (a * b);
    term1 *= -x2 * (2.0 * k + 4.0) / ((2.0 * k + 2.0) * (2.0 * k + 4.0) * (2.0 * k + 5.0));
  }
}

inline PairKernelValue pair_kernel(Vec3 sep, Vec3 axis, bool dispersive) {
  const double x = norm(sep);
  if (x == 0.0) return {1.0, 0.0};
  const double c = dot(axis, sep) / x;
  const double transverse = 1.0 - c * c;
  const double longitudinal = 1.0 - 3.0 * c * c;
  double j0, j1x;
  const double s = std::sin(x);
  const double co = std::cos(x);
  if (x < kSeriesThreshold) {
    radial_series(x, j0, j1x);
  } else {
    j0 = s / x;
    j1x = (s / x - co) / (x * x);
  }
  PairKernelValue v{1.5 * (transverse * j0 - longitudinal * j1x), 0.0};
  if (dispersive && x >= kNearZone) {
    const double y0 = -co / x;
    const double y1x = (-co / x - s) / (x * x);
    v.g = 1.5 * (transverse * y0 - longitudinal * y1x);
  }
  return v;
}

}  // namespace spinwave::simd
