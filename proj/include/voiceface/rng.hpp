#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace voiceface {

// Deterministic random source. Draws raw 64-bit words from std::mt19937_64
// and derives all variates by hand so that a given seed produces the same
// stream on every platform (the standard leaves distribution algorithms
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n)) % n;
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) {
      u1 = 0x1.0p-53;
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  // Exponential with the given rate; used for Poisson event gaps.
  double exponential(double rate) {
    double u = uniform();
    if (u >= 1.0) {
      u = 1.0 - 0x1.0p-53;
    }
    return -std::log(1.0 - u) / rate;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace voiceface
