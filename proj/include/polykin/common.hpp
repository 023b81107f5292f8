#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polykin {

using Vec3 = std::array<double, 3>;

inline constexpr double pi = 3.14159265358979323846;

// Bad input: parameter out of range, malformed config, inconsistent state.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Algorithm failed to meet its target: quadrature non-convergence,
// majorant violation, indefinite Galerkin system, positivity loss.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline double sq(double x) { return x * x; }

// Neumaier compensated accumulator; keeps long reductions at O(1) ulp.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

}  // namespace polykin
