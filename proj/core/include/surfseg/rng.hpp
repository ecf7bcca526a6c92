#pragma once

#include <cmath>
#include <cstdint>

namespace surfseg {

/// Counter-based deterministic generator built on the SplitMix64 finalizer.
///
/// All randomness in this project flows through this generator so that runs
/// are reproducible from a single 64-bit seed and fixtures can be regenerated
/// in any language. The algorithm, exactly:
///
///   mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
///           z ^= z >> 27; z *= 0x94D049BB133111EB
///           z ^= z >> 31; return z            (all mod 2^64)
///
///   stream base:  b = mix(seed + stream * 0xD2B74407B1CE6E93)
///   k-th output:  u64_k = mix(b + (k + 1) * 0x9E3779B97F4A7C15)
///
///   uniform double in [0,1): (u64 >> 11) * 2^-53
///   standard normal: Box-Muller on two consecutive uniforms,
///     sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
///
/// Stream ids keep independent uses of the same seed decoupled; each module
/// documents the streams it consumes.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed + stream * 0xD2B74407B1CE6E93ULL)) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next_u64() {
    return mix(base_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Standard normal via Box-Muller; consumes two counters per call.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

/// Well-known stream ids (see individual modules for usage).
namespace rng_stream {
inline constexpr std::uint64_t kSurface = 1;
inline constexpr std::uint64_t kImageNoise = 2;
inline constexpr std::uint64_t kSplit = 3;
inline constexpr std::uint64_t kAugment = 4;
inline constexpr std::uint64_t kOracle = 5;
inline constexpr std::uint64_t kInit = 6;
}  // namespace rng_stream

/// Per-sample seed derivation used by dataset generation.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng::mix(seed + 0x632BE59BD9B4E019ULL * (index + 1));
}

}  // namespace surfseg
