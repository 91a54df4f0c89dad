#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dra {

// Sampling helpers built directly on the mt19937_64 output stream. The
// standard distributions are implementation-defined, so seeded runs would not
// reproduce across standard libraries; these do.

inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t bound) {
  // rejection sampling, unbiased for any bound >= 1
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r;
  do {
    r = gen();
  } while (r >= limit);
  return r % bound;
}

// uniform in [0, 1) with 53 random bits
inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(gen);
}

// Box-Muller; one variate per call keeps the stream layout simple.
inline double standard_normal(std::mt19937_64& gen) {
  double u1;
  do {
    u1 = uniform_unit(gen);
  } while (u1 <= 0.0);
  const double u2 = uniform_unit(gen);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace dra
