#pragma once

#include <cmath>
#include <cstdint>

#include "tofsim/geometry.hpp"

namespace tofsim {

/// Seedable PCG32 stream with a fixed draw protocol, so identical seeds give
/// identical byte sequences on every platform (std::normal_distribution is
/// implementation-defined and cannot be used here).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    state_ = 0u;
    next_u32();
    state_ += 0x853c49e6748fea9bULL ^ seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + kIncrement;
    const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  /// Uniform in [0, 1).
  double uniform() { return next_u32() * 0x1p-32; }

  /// Uniform in (0, 1].
  double uniform_open() { return (static_cast<double>(next_u32()) + 1.0) * 0x1p-32; }

  /// Box-Muller; consumes exactly two uniforms per call.
  double gaussian(double mean, double sigma) {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    return mean + sigma * z;
  }

 private:
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;
  std::uint64_t state_ = 0;
};

}  // namespace tofsim
