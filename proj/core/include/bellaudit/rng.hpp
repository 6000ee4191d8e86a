#pragma once

#include <cstdint>
#include <limits>

namespace bellaudit {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based substream generator. A stream is identified by
/// (root seed, stream id); its n-th output is a pure function of
/// (seed, id, n), so trial results do not depend on how trials are
/// distributed over workers.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream_id)
      : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ mix64(stream_id + 0x9E3779B97F4A7C15ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0, by rejection of the biased low range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
      const std::uint64_t x = (*this)();
      if (x >= threshold) return x % n;
    }
  }

  bool coin(double p_true) { return uniform() < p_true; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bellaudit
