#pragma once

#include <cstdint>

namespace rwle {

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 stream. Deterministic across platforms, unlike the std
// distributions, so serialized generator output is reproducible everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, bound), bias-free via rejection.
  uint64_t next_below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  long next_index(long bound) { return static_cast<long>(next_below(static_cast<uint64_t>(bound))); }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bool() { return next_u64() >> 63; }

  // UniformRandomBitGenerator, so std::shuffle works on top of this stream.
  using result_type = uint64_t;
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ULL; }
  uint64_t operator()() { return next_u64(); }

 private:
  uint64_t state_;
};

// Counter-based stream derivation: independent substream keyed on (seed, key).
inline Rng derive_stream(uint64_t seed, uint64_t key) {
  return Rng(mix64(seed ^ 0x5851f42d4c957f2dULL) ^ mix64(key + 0x14057b7ef767814fULL));
}

}  // namespace rwle
