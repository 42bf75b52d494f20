#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace voxlink {

/// Counter-free splittable PRNG (splitmix64). Used everywhere instead of
/// <random> engines+distributions so generated datasets are bit-identical
/// across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (deterministic, no cached spare).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniformly distributed unit vector.
  std::array<double, 3> unit_vector() {
    // rejection sampling in the cube
    for (;;) {
      double x = uniform(-1.0, 1.0);
      double y = uniform(-1.0, 1.0);
      double z = uniform(-1.0, 1.0);
      double n2 = x * x + y * y + z * z;
      if (n2 > 1e-8 && n2 <= 1.0) {
        double n = std::sqrt(n2);
        return {x / n, y / n, z / n};
      }
    }
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  /// Derive an independent stream, e.g. one per subject.
  Rng split(std::uint64_t stream) const {
    Rng mixer(state_ ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    return Rng(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace voxlink
