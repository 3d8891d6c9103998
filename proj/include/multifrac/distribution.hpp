#pragma once

#include <vector>

#include "multifrac/ifs.hpp"
#include "multifrac/thermo.hpp"

namespace multifrac {

/// F_mu(x) = mu((-inf, x]) as midpoint +- error.
struct StaircaseSample {
  double x;
  double F;
  double error;
};

/// Certified enclosure [below, below + straddle] of F_mu(x) at depth n.
struct DistributionBracket {
  double below;
  double straddle;

  double lower() const noexcept { return below; }
  double upper() const noexcept { return below + straddle; }
};

/// Depth-n cylinders certified left of x count fully, cylinders certified
/// right of x (sharing at most the point x) count zero; the straddling ones
/// form the uncertainty. The measure has no atoms, so a cylinder touching x
/// in a single point contributes nothing.
DistributionBracket distribution_bracket(const MarkovMeasure& mu, const Ifs& ifs, double x, int n);
StaircaseSample distribution_function(const MarkovMeasure& mu, const Ifs& ifs, double x, int n);

/// F at every depth-n cylinder endpoint, sorted by x; F is nondecreasing and
/// the last value is 1.
std::vector<StaircaseSample> staircase(const MarkovMeasure& mu, const Ifs& ifs, int n,
                                       const EnumerationBudget& budget = {});

struct MassBracket {
  double lower;
  double upper;
};

/// Bracket of mu(B(x, r)) for the open ball; throws ValidationError on r <= 0.
MassBracket ball_measure(const MarkovMeasure& mu, const Ifs& ifs, double x, double r, int n);

struct HoelderOptions {
  double r0 = 1.0;
  double rho = 0.5;
  int K = 20;
  int window = 3;
  /// Cylinder depth for the ball brackets; negative selects min(2K + 8, 60).
  int depth = -1;
};

struct HoelderEstimate {
  double x;
  std::vector<double> log_r;
  std::vector<double> log_mass_lower;
  std::vector<double> log_mass_upper;
  std::vector<double> slopes;
  double liminf_est;
  double limsup_est;
  /// Largest half-width of a windowed slope induced by the mass brackets.
  double uncertainty;
  int window;
  /// Set when a mass bracket reached 0 (x in a gap) and the schedule stopped.
  bool truncated;
};

HoelderEstimate pointwise_hoelder(const MarkovMeasure& mu, const Ifs& ifs, double x, const HoelderOptions& options = {});

/// The word 1^(4^0) 2^(4^0) 1^(4^1) 2^(4^1) ... cut at `length` symbols,
/// coding a point whose local dimension oscillates under a Bernoulli measure.
Word block_coding_word(int length);

struct CoarseSample {
  double q;
  double T;
  double alpha;
  double f;
};

/// For each q the root T of sum_{|w| = n} mu[w]^q diam(pi[w])^T = 1, with
/// the Legendre pair alpha = -T'(q), f = T + q alpha.
std::vector<CoarseSample> coarse_spectrum(const MarkovMeasure& mu, const Ifs& ifs, int n,
                                          const std::vector<double>& q_grid, const EnumerationBudget& budget = {});

}  // namespace multifrac
