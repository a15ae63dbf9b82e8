#pragma once

#include <cmath>
#include <cstdint>

namespace ial {

// Counter-based 64-bit generator (splitmix64): the k-th output is a pure
// finalizer of seed + k*golden-gamma, so streams are reproducible from the
// seed alone. Normals use Box-Muller (cosine branch, two uniforms per draw);
// exponentials use inverse CDF.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_normal() {
    double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double next_exponential() { return -std::log(1.0 - next_uniform()); }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::uint64_t state_;
};

}  // namespace ial
