// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace synthgen {

// Deterministic counter-based random streams. A stream is keyed by an
// arbitrary tuple (seed, frame index, subsystem tag, ...); draws are a pure
// function of the key and the draw counter, so any stream can be reproduced
// in isolation and no stream perturbs another.
namespace rngdetail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
  return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace rngdetail

class Rng {
 public:
  Rng() : key_(0) {}
  explicit Rng(uint64_t seed) : key_(rngdetail::splitmix64(seed)) {}

  // Derive an independent stream from this one and extra key material.
  Rng fork(uint64_t salt) const { return Rng(rngdetail::hash_combine(key_, salt), 0); }
  Rng fork(std::string_view tag) const { return fork(rngdetail::fnv1a(tag)); }

  uint64_t next_u64() { return rngdetail::splitmix64(key_ ^ counter_++); }

  uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi]; lo == hi yields lo exactly.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    if (hi <= lo) return lo;
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    // Lemire rejection to avoid modulo bias.
    uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * span;
    uint64_t l = static_cast<uint64_t>(m);
    if (l < span) {
      uint64_t t = (0 - span) % span;
      while (l < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * span;
        l = static_cast<uint64_t>(m);
      }
    }
    return lo + static_cast<int64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  Rng(uint64_t key, uint64_t counter) : key_(key), counter_(counter) {}

  uint64_t key_;
  uint64_t counter_ = 0;
};

// Stream for one frame's subsystem, keyed by (seed, frame, tag).
inline Rng frame_stream(uint64_t seed, uint64_t frame, std::string_view tag) {
  return Rng(seed).fork(frame).fork(tag);
}

}  // namespace synthgen
