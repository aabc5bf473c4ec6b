#include "fermat/rng.hpp"

#include <cmath>

#include "fermat/errors.hpp"

namespace fermat {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 in (0,1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  have_cached_normal_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw NumericalError("poisson: mean must be nonnegative");
  if (mean > 5e8) throw NumericalError("poisson: mean too large (> 5e8)");
  if (mean == 0.0) return 0;
  std::uint64_t count = 0;
  double acc = 0.0;
  for (;;) {
    // -log(1-u) is Exp(1); arrivals before `mean` are Poisson(mean).
    acc += -std::log1p(-uniform());
    if (acc >= mean) break;
    ++count;
  }
  return count;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::string_view tag,
                          std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(seed ^ 0x6A09E667F3BCC909ULL);
  h = mix64(h ^ fnv1a(tag));
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

}  // namespace fermat
