#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "multifrac/ifs.hpp"
#include "multifrac/potential.hpp"

namespace fixtures {

using namespace multifrac;

inline std::shared_ptr<const Ifs> dyadic() {
  return Ifs::make_shared({{BranchMap::affine(0.5, 0.0), BranchMap::affine(0.5, 0.5)}, Interval{0.0, 1.0}, {}});
}

/// {x/3, 2x/3 + 1/3}: tiles [0, 1] with ratios 1/3 and 2/3.
inline std::shared_ptr<const Ifs> thirds() {
  return Ifs::make_shared(
      {{BranchMap::affine(1.0 / 3.0, 0.0), BranchMap::affine(2.0 / 3.0, 1.0 / 3.0)}, Interval{0.0, 1.0}, {}});
}

/// Middle-third Cantor system.
inline std::shared_ptr<const Ifs> cantor() {
  return Ifs::make_shared(
      {{BranchMap::affine(1.0 / 3.0, 0.0), BranchMap::affine(1.0 / 3.0, 2.0 / 3.0)}, Interval{0.0, 1.0}, {}});
}

/// {x/(x+2), 2/(3-x)} on [0, 1].
inline std::shared_ptr<const Ifs> moebius_pair() {
  return Ifs::make_shared(
      {{BranchMap::moebius(1.0, 0.0, 1.0, 2.0), BranchMap::moebius(0.0, 2.0, -1.0, 3.0)}, Interval{0.0, 1.0}, {}});
}

inline Potential bernoulli(double p, double q) { return Potential::symbol_log_weights({std::log(p), std::log(q)}); }

/// log of a 2x2 stochastic matrix with rows drawn uniformly in [0.35, 0.65]
/// from mt19937_64(seed), as a depth-2 table in lexicographic order.
inline std::vector<double> seeded_markov_table(unsigned long long seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> row(0.35, 0.65);
  std::vector<double> table;
  for (int a = 0; a < 2; ++a) {
    const double p = row(rng);
    table.push_back(std::log(p));
    table.push_back(std::log(1.0 - p));
  }
  return table;
}

inline Potential seeded_depth2(unsigned long long seed = 7) {
  return Potential::locally_constant(2, 2, seeded_markov_table(seed));
}

inline double log2_bernoulli_t(double p, double q, double beta) {
  return std::log2(std::pow(p, beta) + std::pow(q, beta));
}

}  // namespace fixtures
