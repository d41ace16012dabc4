#pragma once

#include <cstdint>
#include <random>

namespace emotrust {

/// Seeded pseudo-random stream shared by everything inside one run.
///
/// The standard distributions are implementation-defined, so the bounded
/// integer and unit-interval draws are derived from the raw 64-bit engine
/// output directly; a given seed yields the same sequence on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

  int below(int bound) {
    return static_cast<int>(below(static_cast<std::uint64_t>(bound)));
  }

  /// Always consumes one draw, so the stream layout does not depend on p.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace emotrust
