#pragma once

#include <cstdint>
#include <limits>

namespace tcs {

// SplitMix64 used two ways: as a mixing function to derive independent stream
// keys from (seed, i, j, ...) and as the stream generator itself. Satisfies
// UniformRandomBitGenerator, so std distributions can consume it.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Counter-based stream key: depends only on the arguments, never on call order.
  static constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                     std::uint64_t c = 0) {
    std::uint64_t h = mix(seed ^ 0x243f6a8885a308d3ULL);
    h = mix(h ^ (a + 0x13198a2e03707344ULL));
    h = mix(h ^ (b + 0xa4093822299f31d0ULL));
    h = mix(h ^ (c + 0x082efa98ec4e6c89ULL));
    return h;
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                           std::uint64_t c = 0) {
    return SplitMix64(key(seed, a, b, c));
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

}  // namespace tcs
