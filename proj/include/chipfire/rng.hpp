#pragma once

#include <array>
#include <cstdint>

namespace chipfire {

// Deterministic randomness for the random strategies and Monte-Carlo runs.
// Two requirements drive the design: byte-identical replay across platforms
// for a given seed, and cheap derivation of independent streams (one per
// trial, one per walk) from a single master seed. std::mt19937 would satisfy
// the first but std::uniform_int_distribution is implementation-defined, so
// both the engine and the bounded-draw logic are pinned here.

namespace detail {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Stream `index` of master seed `master`: the index-th output of a SplitMix64
// sequence. Distinct indices give statistically independent generators.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return detail::splitmix64_mix(master + (index + 1) * detail::kSplitMixGamma);
}

// xoshiro256** seeded through SplitMix64, with rejection sampling for
// unbiased bounded draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += detail::kSplitMixGamma;
      word = detail::splitmix64_mix(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform draw from [0, bound). bound == 0 is a caller bug; returns 0.
  std::uint64_t below(std::uint64_t bound) {
    if (bound < 2) return 0;
    // Reject into the largest multiple of bound to avoid modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive ends
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace chipfire
