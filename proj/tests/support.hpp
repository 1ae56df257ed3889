#pragma once

#include "weylcheck/numeric.hpp"

#include <algorithm>

namespace weylcheck::testing {

// Largest relative deviation between two expressions over seeded assignments.
inline double max_deviation(const Expr& x, const Expr& y, int trials = 100, std::uint64_t seed = 7) {
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    auto rng = trial_rng(seed, k);
    const Assignment a = sample_assignment(rng);
    worst = std::max(worst, deviation(evaluate(x, a), evaluate(y, a)));
  }
  return worst;
}

inline std::vector<Expr> random_densities(int count, std::uint64_t seed, const RandomOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Expr> out;
  for (int k = 0; k < count; ++k) out.push_back(random_density(rng, opts));
  return out;
}

}  // namespace weylcheck::testing
