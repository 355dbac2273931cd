#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pqc {

/// SplitMix64 generator (Steele, Lea & Flood 2014). Counter-based state with a
/// 64-bit finalizer, so identical seeds produce identical streams everywhere
/// integer arithmetic is exact. Substreams are derived by hashing the parent
/// seed together with an ordinal, which keeps per-record generation order-free.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n); modulo rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  /// Standard normal via Box-Muller. Draws two uniforms per call; no cached
  /// spare, so the stream position is a pure function of the call count.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Fisher-Yates shuffle.
  template <typename V>
  void shuffle(V& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Seed of the `ordinal`-th substream of `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t ordinal) {
  return SplitMix64::mix(SplitMix64::mix(seed) +
                         (ordinal + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace pqc
