#pragma once

#include <cstdint>

namespace lmv {

/// Counter-based generator: the i-th draw of stream s under seed k is a pure
/// function of (k, s, i), so results never depend on evaluation order across
/// streams.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix(mix(mix(seed) ^ stream) ^ counter);
  }

  std::uint64_t next_u64() { return at(seed_, stream_, counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes two draws per call.
  double normal();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  std::uint64_t counter() const { return counter_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Stream ids used across the project. Every stochastic operation draws from
/// its own stream.
namespace streams {
inline constexpr std::uint64_t kTargetInit = 1;
inline constexpr std::uint64_t kEncoderInit = 2;
inline constexpr std::uint64_t kDecoderInit = 3;
inline constexpr std::uint64_t kCollocation = 10;
inline constexpr std::uint64_t kIcPoints = 11;
inline constexpr std::uint64_t kBcPoints = 12;
inline constexpr std::uint64_t kMatrices = 20;
inline constexpr std::uint64_t kToyData = 30;
inline constexpr std::uint64_t kRlw = 40;
inline constexpr std::uint64_t kBatchShuffle = 50;
inline constexpr std::uint64_t kGridSamples = 51;
inline constexpr std::uint64_t kProbes = 60;
inline constexpr std::uint64_t kEvalSamples = 70;
}  // namespace streams

/// Derives a sub-stream id (e.g. one per epoch) from a base stream.
inline std::uint64_t sub_stream(std::uint64_t base, std::uint64_t index) {
  return CounterRng::mix(base * 0x100000001b3ULL + index);
}

}  // namespace lmv
