#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace spinwave {

using cplx = std::complex<double>;

/// Plain 3-vector. Positions and wave vectors are stored dimensionless
/// (lengths multiplied by k_eg, wave vectors divided by k_eg).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Wave vector in units of k_eg. The magnitude is cached at construction.
class WaveVector {
 public:
  WaveVector() = default;
  explicit WaveVector(Vec3 components);
  WaveVector(double x, double y, double z) : WaveVector(Vec3{x, y, z}) {}

  const Vec3& components() const { return k_; }
  double magnitude() const { return magnitude_; }
  operator const Vec3&() const { return k_; }  // NOLINT(google-explicit-constructor)

 private:
  Vec3 k_{};
  double magnitude_ = 0.0;
};

/// Wave-vector difference, the argument of the S functions and structure factors.
using DeltaK = Vec3;

}  // namespace spinwave
