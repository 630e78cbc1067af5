#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace rnsim {

// All randomized code in this library draws from self-contained generators so
// that results are bit-identical across compilers, standard libraries, and
// thread schedules. Parallel loops derive one independent substream per work
// item (trial, tile, attempt, ...) instead of sharing a generator.

namespace detail {
inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;
}

/// SplitMix64 finalizer.
constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derives an independent substream seed from a base seed and a key path,
/// e.g. derive_stream(seed, {kTrial, trial_index, attempt}). Key order is
/// significant. Same inputs give the same stream everywhere.
inline uint64_t derive_stream(uint64_t seed, std::initializer_list<uint64_t> keys) {
  uint64_t h = mix64(seed + detail::kGolden);
  for (uint64_t k : keys) {
    h = mix64(h ^ mix64(k + detail::kGolden));
  }
  return h;
}

/// xoshiro256++ seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    for (auto& s : state_) {
      seed += detail::kGolden;
      s = mix64(seed);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
      state_[0] = detail::kGolden;
    }
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Unbiased draw in [0, bound); bound must be >= 1.
  uint64_t below(uint64_t bound) {
    // Lemire's multiply-shift rejection method.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<uint64_t>(m);
    if (low < bound) {
      const uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

  bool bernoulli(double p) { return real01() < p; }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<uint64_t, 4> state_;
};

}  // namespace rnsim
