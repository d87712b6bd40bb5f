// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace depthmine {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be nonzero");
  // Lemire multiply-shift; the bias is below 2^-64 per draw and identical on
  // every platform, which is what the determinism contract needs.
  return static_cast<std::uint64_t>(
      (static_cast<__uint128_t>(next_u64()) * static_cast<__uint128_t>(n)) >> 64);
}

double Rng::normal(double mean, double stddev) {
  const double u1 = uniform01();
  const double u2 = uniform01();
  // 1 - u1 lies in (0, 1], keeping the log argument positive.
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  return mean + stddev * radius * std::cos(kTwoPi * u2);
}

Rng Rng::child(std::uint64_t stream) const {
  std::uint64_t sm = seed_ + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  return Rng(splitmix64(sm));
}

}  // namespace depthmine
