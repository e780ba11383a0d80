#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "biflab/types.hpp"

namespace biflab {

// std::mt19937_64's output sequence is fixed by the standard; the standard
// distributions are not, so the few draws we need are done by hand to keep
// seeded runs byte-identical across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t cell_seed(std::uint64_t base, std::uint64_t i, std::uint64_t j) {
  return base ^ splitmix64((i << 32) ^ j);
}

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

/// Standard complex Gaussian (Box–Muller).
inline cplx complex_normal(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  double r = std::sqrt(-std::log(u1));
  return std::polar(r, 2.0 * kPi * u2);
}

/// Uniform point on the unit sphere of C^n.
inline HVec random_unit_vector(Rng& rng, int n) {
  HVec v(n);
  for (int i = 0; i < n; ++i) v[i] = complex_normal(rng);
  return v / v.norm();
}

}  // namespace biflab
