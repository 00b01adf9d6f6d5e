#pragma once

#include <cstdint>

namespace dateiv {

/// SplitMix64: one 64-bit additive state step plus a multiply-xorshift
/// finalizer per draw. Pure integer arithmetic, so identical output on every
/// platform for a given state.
///
/// Stream splitting: child stream k of a master seed starts at state
/// `mix(seed) ^ mix(k + 0x9E3779B97F4A7C15)`. Serial and per-stream-parallel
/// runs therefore agree bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_index) {
    return SplitMix64(mix(seed) ^ mix(stream_index + 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); multiply-shift reduction, no modulo bias
  /// worth speaking of at these bounds.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace dateiv
