#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ecp {

// Deterministic random source. std::mt19937_64 emits a fully specified
// sequence; the distribution helpers below avoid the standard library's
// distribution objects, whose algorithms are implementation-defined, so
// that seeded runs are bit-stable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // (0, 1], safe as a log argument
  double uniform_open01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, one variate per call (two engine draws each).
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.28318530717958647692528676655900577 * u2);
  }

  std::vector<double> normal_vector(int dim) {
    std::vector<double> v(static_cast<size_t>(dim));
    for (auto& x : v) x = normal();
    return v;
  }

  // Uniformly random direction scaled to the requested Euclidean norm.
  std::vector<double> direction(int dim, double norm) {
    for (;;) {
      std::vector<double> v = normal_vector(dim);
      double s = 0.0;
      for (double x : v) s += x * x;
      if (s > 1e-300) {
        const double scale = norm / std::sqrt(s);
        for (auto& x : v) x *= scale;
        return v;
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ecp
