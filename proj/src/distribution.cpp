#include "multifrac/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multifrac/errors.hpp"

namespace multifrac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const MarkovMeasure& mu, const Ifs& ifs) {
  if (!(mu.alphabet() == ifs.alphabet())) throw ValidationError("measure and IFS use different alphabets");
}

}  // namespace

DistributionBracket distribution_bracket(const MarkovMeasure& mu, const Ifs& ifs, double x, int n) {
  check_pair(mu, ifs);
  if (n < 1) throw ValidationError("distribution depth must be at least 1");
  if (std::isnan(x)) throw ValidationError("x is NaN");
  if (x <= ifs.hull().lo) return {0.0, 0.0};
  if (x >= ifs.hull().hi) return {1.0, 0.0};

  const int s = ifs.size();
  double below = 0.0;
  std::vector<Word> frontier{Word{}};
  std::vector<Word> next;
  for (int level = 1; level <= n && !frontier.empty(); ++level) {
    next.clear();
    for (const Word& w : frontier) {
      for (int j = 1; j <= s; ++j) {
        Word child = w.extended(j);
        const Interval I = cylinder_interval(ifs, child).interval;
        if (I.hi <= x) {
          below += mu.mass(child);
        } else if (I.lo < x) {
          next.push_back(std::move(child));
        }
      }
    }
    frontier.swap(next);
  }
  double straddle = 0.0;
  for (const Word& w : frontier) straddle += mu.mass(w);
  below = std::clamp(below, 0.0, 1.0);
  return {below, std::min(straddle, 1.0 - below)};
}

StaircaseSample distribution_function(const MarkovMeasure& mu, const Ifs& ifs, double x, int n) {
  const DistributionBracket b = distribution_bracket(mu, ifs, x, n);
  return {x, b.below + 0.5 * b.straddle, 0.5 * b.straddle};
}

std::vector<StaircaseSample> staircase(const MarkovMeasure& mu, const Ifs& ifs, int n,
                                       const EnumerationBudget& budget) {
  check_pair(mu, ifs);
  if (n < 1) throw ValidationError("staircase depth must be at least 1");
  std::vector<Interval> cyl;
  std::vector<double> mass;
  for_each_word(
      ifs.alphabet(), n,
      [&](std::span<const int> w) {
        cyl.push_back(compose_image(ifs, w, ifs.hull()));
        mass.push_back(mu.mass(w));
      },
      budget);

  std::vector<StaircaseSample> out;
  out.reserve(2 * cyl.size() + 1);
  out.push_back({cyl.front().lo, 0.0, 0.0});
  double cum = 0.0;
  for (std::size_t k = 0; k < cyl.size(); ++k) {
    cum += mass[k];
    const double F = std::min(cum, 1.0);
    if (k + 1 == cyl.size()) {
      out.push_back({cyl[k].hi, 1.0, 0.0});
      break;
    }
    const Interval& a = cyl[k];
    const Interval& b = cyl[k + 1];
    if (a.hi <= b.lo) {
      out.push_back({a.hi, F, 0.0});
      if (b.lo > a.hi) out.push_back({b.lo, F, 0.0});
    } else {
      // Enclosures of neighbouring cylinders overlap after outward rounding;
      // the shared endpoint lies somewhere in [b.lo, a.hi].
      out.push_back({0.5 * (a.hi + b.lo), F, std::max(mass[k], mass[k + 1])});
    }
  }
  return out;
}

MassBracket ball_measure(const MarkovMeasure& mu, const Ifs& ifs, double x, double r, int n) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  const DistributionBracket left = distribution_bracket(mu, ifs, x - r, n);
  const DistributionBracket right = distribution_bracket(mu, ifs, x + r, n);
  const double lower = std::max(0.0, right.lower() - left.upper());
  const double upper = std::min(1.0, right.upper() - left.lower());
  return {lower, std::max(lower, upper)};
}

HoelderEstimate pointwise_hoelder(const MarkovMeasure& mu, const Ifs& ifs, double x, const HoelderOptions& options) {
  if (!(options.rho > 0.0 && options.rho < 1.0)) throw ValidationError("rho must lie in (0, 1)");
  if (!(options.r0 > 0.0) || options.r0 * options.rho >= 1.0) {
    throw ValidationError("radius schedule must start below 1");
  }
  if (options.window < 1 || options.K < 2 * options.window) throw ValidationError("need K >= 2 * window >= 2");
  const int depth = options.depth < 0 ? std::min(2 * options.K + 8, 60) : options.depth;

  HoelderEstimate out{};
  out.x = x;
  out.window = options.window;
  out.truncated = false;
  std::vector<double> half_widths;
  for (int k = 1; k <= options.K; ++k) {
    const double r = options.r0 * std::pow(options.rho, k);
    const MassBracket mb = ball_measure(mu, ifs, x, r, depth);
    if (!(mb.lower > 0.0)) {
      out.truncated = true;
      break;
    }
    const double lr = std::log(r);
    const double lo = std::log(mb.lower);
    const double hi = std::log(mb.upper);
    out.log_r.push_back(lr);
    out.log_mass_lower.push_back(lo);
    out.log_mass_upper.push_back(hi);
    out.slopes.push_back(0.5 * (lo + hi) / lr);
    half_widths.push_back(0.5 * (hi - lo) / std::fabs(lr));
  }

  const auto count = out.slopes.size();
  const auto w = static_cast<std::size_t>(options.window);
  if (count < w) throw NumericalError("x lies in a gap of the measure; no slope window available");
  const std::size_t first = count > w ? 1 : 0;
  out.liminf_est = kInf;
  out.limsup_est = -kInf;
  out.uncertainty = 0.0;
  for (std::size_t j = first; j + w <= count; ++j) {
    double mean = 0.0, half = 0.0;
    for (std::size_t i = j; i < j + w; ++i) {
      mean += out.slopes[i];
      half += half_widths[i];
    }
    mean /= static_cast<double>(w);
    half /= static_cast<double>(w);
    out.liminf_est = std::min(out.liminf_est, mean);
    out.limsup_est = std::max(out.limsup_est, mean);
    out.uncertainty = std::max(out.uncertainty, half);
  }
  return out;
}

Word block_coding_word(int length) {
  Word out;
  for (std::size_t block = 1; static_cast<int>(out.size()) < length; block *= 4) {
    for (int symbol = 1; symbol <= 2; ++symbol) {
      for (std::size_t i = 0; i < block && static_cast<int>(out.size()) < length; ++i) out.push_back(symbol);
    }
  }
  return out;
}

std::vector<CoarseSample> coarse_spectrum(const MarkovMeasure& mu, const Ifs& ifs, int n,
                                          const std::vector<double>& q_grid, const EnumerationBudget& budget) {
  check_pair(mu, ifs);
  if (n < 1) throw ValidationError("coarse depth must be at least 1");
  std::vector<double> log_mass, log_diam;
  for_each_word(
      ifs.alphabet(), n,
      [&](std::span<const int> w) {
        const double m = mu.mass(w);
        if (m <= 0.0) return;
        const double d = compose_image(ifs, w, ifs.hull()).diameter();
        if (!(d > 0.0 && d < 1.0)) throw NumericalError("cylinder diameters must lie in (0, 1) for the coarse root");
        log_mass.push_back(std::log(m));
        log_diam.push_back(std::log(d));
      },
      budget);

  std::vector<double> weights(log_mass.size());
  // log sum mu^q diam^T, decreasing in T; weights hold the exponents.
  auto log_partition = [&](double q, double T) {
    double top = -kInf;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = q * log_mass[i] + T * log_diam[i];
      top = std::max(top, weights[i]);
    }
    double sum = 0.0;
    for (double v : weights) sum += std::exp(v - top);
    return top + std::log(sum);
  };

  std::vector<CoarseSample> out;
  for (double q : q_grid) {
    if (!std::isfinite(q)) throw ValidationError("q grid must be finite");
    double lo = -1.0, hi = 2.0;
    for (int k = 0; log_partition(q, lo) <= 0.0; ++k) {
      if (k == 60) throw NumericalError("coarse root bracket failure");
      const double width = hi - lo;
      hi = lo;
      lo -= 2.0 * width;
    }
    for (int k = 0; log_partition(q, hi) >= 0.0; ++k) {
      if (k == 60) throw NumericalError("coarse root bracket failure");
      const double width = hi - lo;
      lo = hi;
      hi += 2.0 * width;
    }
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(mid)) || mid <= lo || mid >= hi) break;
      (log_partition(q, mid) > 0.0 ? lo : hi) = mid;
    }
    const double T = 0.5 * (lo + hi);
    const double top = log_partition(q, T);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double p = std::exp(weights[i] - top);
      num += p * log_mass[i];
      den += p * log_diam[i];
    }
    const double alpha = num / den;
    out.push_back({q, T, alpha, T + q * alpha});
  }
  return out;
}

}  // namespace multifrac
