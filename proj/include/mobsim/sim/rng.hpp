#pragma once

#include <cstdint>
#include <random>

#include "mobsim/sim/time.hpp"

namespace mobsim::sim {

/// Deterministic random source.
///
/// The standard distributions are implementation-defined, so results would
/// differ between standard libraries. Only the raw mt19937_64 output is
/// portable; every draw here is derived from it with fixed arithmetic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound). bound == 0 yields 0.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// Uniform duration in [lo, hi). Returns lo when the range is empty.
  Duration duration(Duration lo, Duration hi) {
    if (hi <= lo) return lo;
    return lo + Duration{static_cast<std::int64_t>(below(static_cast<std::uint64_t>((hi - lo).count())))};
  }

  /// Child stream for an independent component; stable for a given (parent seed, salt).
  Rng fork(std::uint64_t salt) { return Rng{mix(engine_() ^ mix(salt))}; }

  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mobsim::sim
