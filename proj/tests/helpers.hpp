#pragma once

#include <cstdint>
#include <vector>

#include "stray/core.hpp"
#include "stray/rng.hpp"

namespace testutil {

inline stray::DataMatrix uniform_matrix(std::size_t n, std::size_t d, std::uint64_t seed,
                                        double lo = -1.0, double hi = 1.0) {
  stray::Rng rng(seed);
  std::vector<double> v(n * d);
  for (double& x : v) x = rng.uniform(lo, hi);
  return stray::DataMatrix(n, d, std::move(v));
}

inline stray::DataMatrix normal_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  stray::Rng rng(seed);
  std::vector<double> v(n * d);
  for (double& x : v) x = rng.normal();
  return stray::DataMatrix(n, d, std::move(v));
}

// Values on a 2^-10 grid inside [-8, 8]: sums, differences and power-of-two
// scalings of these are exact in double precision.
inline stray::DataMatrix dyadic_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  stray::Rng rng(seed);
  std::vector<double> v(n * d);
  for (double& x : v) {
    x = (static_cast<double>(rng.below(16 * 1024)) - 8.0 * 1024.0) / 1024.0;
  }
  return stray::DataMatrix(n, d, std::move(v));
}

}  // namespace testutil
