// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace lorasim {

// Deterministic random stream. Monte Carlo workers never share engines;
// every (seed, point, frame) triple owns its own stream, derived through a
// splitmix64 finalizer so streams are decorrelated and reproducible no matter
// how frames are scheduled across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream substream(std::uint64_t seed, std::uint64_t point_index,
                             std::uint64_t frame_index);

  // Mixed 64-bit seed of the (seed, point, frame) substream; exposed so tests
  // can check stream disjointness directly.
  static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t point_index,
                                      std::uint64_t frame_index);

  double standard_normal() { return normal_(engine_); }

  // Circularly symmetric complex gaussian CN(0, variance): magnitude
  // sqrt(-variance ln u1), uniform phase. One Box-Muller transform per
  // sample, consuming exactly two engine outputs.
  std::complex<double> circular_gaussian(double variance) {
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;          // [0, 1)
    const double radius = std::sqrt(-variance * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lorasim
