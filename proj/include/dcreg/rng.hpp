#ifndef DCREG_RNG_HPP
#define DCREG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace dcreg {

/// Deterministic random stream. std::mt19937_64 produces an
/// implementation-independent bit sequence; the uniform/normal transforms
/// below are written out explicitly because the std::*_distribution
/// algorithms are implementation-defined and would break bitwise
/// reproducibility of seeded benchmark runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. One value per call, no caching,
  /// so interleaved consumers stay reproducible.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dcreg

#endif
