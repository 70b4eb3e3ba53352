#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gridtune {

// Deterministic random source shared by the engines and the synthetic
// harness. mt19937_64 output is pinned by the standard; the derived draws
// below avoid std::uniform_*_distribution, whose streams differ between
// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Unbiased uniform draw in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    for (;;) {
      const std::uint64_t x = gen_();
      const std::uint64_t r = x % bound;
      if (x - r <= std::uint64_t(0) - bound) return r;
    }
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double normal() {
    double u1 = unit();
    const double u2 = unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gridtune
