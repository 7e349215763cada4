// SPDX-License-Identifier: Apache-2.0
#include "lorasim/rng.hpp"

namespace lorasim {

namespace {

// splitmix64 finalizer (Steele, Lea, Flood: "Fast splittable pseudorandom
// number generators").
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

std::uint64_t RngStream::substream_seed(std::uint64_t seed, std::uint64_t point_index,
                                        std::uint64_t frame_index) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(point_index + 0x517cc1b727220a95ull));
  h = mix64(h ^ mix64(frame_index + 0x2545f4914f6cdd1dull));
  return h;
}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t point_index,
                               std::uint64_t frame_index) {
  RngStream s(0);
  s.engine_.seed(substream_seed(seed, point_index, frame_index));
  return s;
}

}  // namespace lorasim
