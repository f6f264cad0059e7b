#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rigcov {

// Seeded generator with explicitly defined draws. The standard distributions
// are implementation-defined, so replayable runs map engine output by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound).
  std::uint64_t index(std::uint64_t bound) { return engine_() % bound; }

  // Uniform double in [0, 1) built from the top 53 bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one draw per call, second discarded).
  double normal();

 private:
  std::mt19937_64 engine_;
};

inline double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925 * u2);
}

}  // namespace rigcov
