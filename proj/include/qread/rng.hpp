#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qread {

// splitmix64 finalizer. Used as the stated seed-splitting rule: the seed of
// stream i derived from a root seed is mix64(root + i).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded generator with fixed-layout distributions. std::mt19937_64 output is
// fully specified by the standard; the standard *distributions* are not, so
// uniforms and normals are derived explicitly to keep streams reproducible
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1]: never returns 0, so log(uniform()) is finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch; two uniforms per draw).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool bernoulli(double p) { return uniform() <= p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qread
