#pragma once

#include <cstdint>

#include "polykin/common.hpp"

namespace polykin {

// Counter-based random streams.  Every (seed, stream, index) triple opens an
// independent generator, so sample i of an estimator is reproducible without
// generating samples 0..i-1 and independent of how work is partitioned.
// Within one sample the draws are sequential splitmix64 outputs, which keeps
// rejection loops (gamma sampling) safe.

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
    h = mix64(h ^ stream);
    state_ = mix64(h ^ index);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Strictly inside (0,1): bin centers of a 2^53 grid.
  double uniform() { return ((next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform_in(double a, double b) { return a + (b - a) * uniform(); }

  std::uint64_t pick(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    spare_ = m * std::sin(2.0 * pi * u2);
    has_spare_ = true;
    return m * std::cos(2.0 * pi * u2);
  }

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 via the boost
  // Gamma(shape+1) * U^{1/shape}.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * sq(sq(x))) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  Vec3 unit_sphere() {
    double z = 2.0 * uniform() - 1.0;
    double phi = 2.0 * pi * uniform();
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
  }

  // Velocity with independent N(0, t) components.
  Vec3 maxwellian(double t) {
    double s = std::sqrt(t);
    return {s * normal(), s * normal(), s * normal()};
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream tags; keep distinct so estimators never share draws by accident.
namespace streams {
inline constexpr std::uint64_t weak_q = 101;
inline constexpr std::uint64_t dirichlet = 102;
inline constexpr std::uint64_t gram = 103;
inline constexpr std::uint64_t relax_k = 104;
inline constexpr std::uint64_t h_rate = 105;
inline constexpr std::uint64_t bilinear = 106;
inline constexpr std::uint64_t dsmc = 201;
inline constexpr std::uint64_t sampling = 301;
inline constexpr std::uint64_t pointwise_mc = 302;
}  // namespace streams

}  // namespace polykin
