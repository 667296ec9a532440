#pragma once

#include "convint/core.hpp"

#include <cstdint>
#include <limits>

namespace convint {

/// Counter-based generator: the i-th draw is the SplitMix64 finaliser applied
/// to key + i * golden-gamma, with the key itself a mixed seed. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(Seed seed) : key_(mix(seed ^ 0x6A09E667F3BCC909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached second variate, so draws are stateless).
  double normal();

  /// Poisson variate. Inversion for small means, PTRS transformed rejection otherwise.
  std::uint64_t poisson(double mean);

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace convint
