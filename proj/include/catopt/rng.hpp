#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace catopt {

// Seedable generator used by every instance generator in the library.
//
// Algorithm identity (so instances can be regenerated elsewhere):
//   * engine: std::mt19937_64 seeded directly with the 64-bit seed
//   * uniform(): top 53 bits of one engine draw, scaled to [0, 1)
//   * normal(): Box-Muller, cosine branch, consuming exactly two uniforms
//     per deviate (no caching of the sine branch)
//
// Identical seeds therefore give identical draw sequences on any platform
// with IEEE doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal deviate.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]; keeps log() finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double normal(double stddev) { return stddev * normal(); }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace catopt
