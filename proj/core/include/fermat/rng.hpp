#pragma once

#include <cstdint>
#include <string_view>

namespace fermat {

/// SplitMix64 generator with explicit 64-bit seeds.
///
/// Every stream is identified by a (seed, tag, indices) triple hashed into
/// the initial state, so parallel sweeps can hand each task its own
/// independent, reproducible stream. Output is identical across platforms
/// and thread counts: all distributions below are implemented directly on
/// top of next_u64() instead of relying on std::<random> distributions,
/// whose output is not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Poisson draw by summing exponential arrivals; exact for any mean,
  /// O(mean) work. Throws NumericalError for mean > 5e8.
  std::uint64_t poisson(double mean);

  /// Derive a child seed from (seed, tag, a, b). Same inputs, same child.
  static std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                              std::uint64_t a = 0, std::uint64_t b = 0);

 private:
  std::uint64_t state_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace fermat
