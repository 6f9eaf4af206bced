#pragma once

// Portable seeded random streams.
//
// The generator is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter
// advanced by the golden-ratio increment and passed through a fixed
// avalanche finalizer. Bounded integers use rejection sampling on the top
// bits, so the same seed produces the same values on every platform and
// standard library. std::*_distribution is deliberately not used anywhere in
// simulation code because its output is implementation-defined.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>

namespace pixelbench {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a over bytes; used to fold names into seeds.
inline constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0, bound). bound must be > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    // Rejection on the largest multiple of bound that fits in 2^64.
    const std::uint64_t limit = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= limit) return r % bound;
    }
  }

  // Uniform integer in the closed range [lo, hi].
  constexpr std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Independent child stream; advances this stream by one draw.
  constexpr Rng split() noexcept { return Rng(mix64(next_u64() ^ 0xD1B54A32D192ED03ULL)); }

  template <typename T>
  constexpr void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// Deterministic sub-seed from a base seed and an ordered list of stream keys.
inline constexpr std::uint64_t derive_seed(std::uint64_t base,
                                           std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(base ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x9E3779B97F4A7C15ULL));
  return h;
}

}  // namespace pixelbench
