#pragma once

#include <cstdint>
#include <cmath>

namespace plab {

// Counter-based generator: every draw is a hash of (key, counter), so streams
// derived from (seed, stream-id) are independent and the sequence depends only
// on the draw index. Mixing is the splitmix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + kGamma) ^ mix(~stream))), ctr_(0) {}

  static std::uint64_t derive_stream(std::uint64_t role, std::uint64_t index) {
    return mix(role * kGamma + index);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++ctr_) * kGamma;
    return mix(z);
  }

  // uniform on the open interval (0,1)
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential() { return -std::log(uniform01()); }

  // Box-Muller, one value per call (no cached pair, keeps draws countable)
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Marsaglia-Tsang; requires shape >= 1
  double gamma(double shape) {
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform01();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace plab
