#include "multifrac/multifractal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "multifrac/errors.hpp"
#include "multifrac/parallel.hpp"

namespace multifrac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bracket {
  double lo;
  double hi;
};

// Root of a decreasing function: expand [lo, hi] geometrically until the
// sign changes, then bisect down to tol * max(1, |root|).
Bracket bisect_decreasing(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  double flo = fn(lo);
  for (int k = 0; flo <= 0.0; ++k) {
    if (flo == 0.0) return {lo, lo};
    if (k == 60) throw NumericalError("root bracket expansion exhausted below; phi is not bounded away from 0");
    const double width = hi - lo;
    hi = lo;
    lo -= 2.0 * width;
    flo = fn(lo);
  }
  double fhi = fn(hi);
  for (int k = 0; fhi >= 0.0; ++k) {
    if (fhi == 0.0) return {hi, hi};
    if (k == 60) throw NumericalError("root bracket expansion exhausted above; phi is not bounded away from 0");
    const double width = hi - lo;
    lo = hi;
    hi += 2.0 * width;
    fhi = fn(hi);
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(1.0, std::fabs(mid)) || mid <= lo || mid >= hi) break;
    const double v = fn(mid);
    if (v == 0.0) return {mid, mid};
    (v > 0.0 ? lo : hi) = mid;
  }
  return {lo, hi};
}

}  // namespace

MultifractalProblem::MultifractalProblem(Potential phi, Potential psi, double shift, PressureOptions options,
                                         TableBracket a, TableBracket b)
    : phi_(std::move(phi)),
      psi_(std::move(psi)),
      psi_shift_(shift),
      options_(options),
      phi_tables_(std::move(a)),
      psi_tables_(std::move(b)) {}

MultifractalProblem MultifractalProblem::create(const Potential& phi, const Potential& psi,
                                                const PressureOptions& options) {
  if (!(phi.alphabet() == psi.alphabet())) throw ValidationError("phi and psi live on different alphabets");
  if (!phi.strictly_negative()) throw ValidationError("phi must be strictly negative");
  const int m = common_depth(phi, psi, options.approximation_depth);
  options.budget.check(phi.alphabet(), m);
  TableBracket raw = potential_tables(psi, m);
  const double shift = pressure_from_tables(raw, options, false).value;
  Potential normalized = psi.shifted(-shift);
  return MultifractalProblem(phi, normalized, shift, options, potential_tables(phi, m),
                             potential_tables(normalized, m));
}

PressureEstimate MultifractalProblem::pressure(double t, double beta, bool bounds) const {
  return pressure_from_tables(combine_tables(t, phi_tables_, beta, psi_tables_), options_, bounds);
}

double TSolution::error() const noexcept { return std::max(t - lower, upper - t); }

TSolution solve_t(const MultifractalProblem& problem, double beta) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  const Bracket b = bisect_decreasing([&](double t) { return problem.pressure(t, beta).value; }, -1.0, 2.0, 1e-13);
  TSolution out{0.5 * (b.lo + b.hi), b.lo, b.hi, 0.0};
  out.residual = problem.pressure(out.t, beta).value;
  if (!problem.exact()) {
    const auto& opts = problem.options();
    auto bound = [&](double t, bool upper) {
      const TableBracket tb = combine_tables(t, problem.phi_tables(), beta, problem.psi_tables());
      return upper ? perron_data(tb.upper, opts, false).log_upper : perron_data(tb.lower, opts, false).log_lower;
    };
    const Bracket lo = bisect_decreasing([&](double t) { return bound(t, false); }, out.t - 1.0, out.t, 1e-12);
    const Bracket hi = bisect_decreasing([&](double t) { return bound(t, true); }, out.t, out.t + 1.0, 1e-12);
    out.lower = std::min(lo.lo, b.lo);
    out.upper = std::max(hi.hi, b.hi);
  }
  return out;
}

AlphaSample alpha_of_beta(const MultifractalProblem& problem, double beta, double t) {
  const TableBracket tb = combine_tables(t, problem.phi_tables(), beta, problem.psi_tables());
  const MarkovMeasure mu = MarkovMeasure::from_table(tb.mid, problem.options());
  double int_phi = 0.0, int_psi = 0.0;
  const auto& pi = mu.stationary();
  for (std::size_t u = 0; u < pi.size(); ++u) {
    int_phi += pi[u] * problem.phi_tables().mid[u];
    int_psi += pi[u] * problem.psi_tables().mid[u];
  }
  AlphaSample out{int_psi / int_phi, 0.0, 0.0};
  const double up = solve_t(problem, beta + kAlphaStep).t;
  const double down = solve_t(problem, beta - kAlphaStep).t;
  out.crosscheck = -(up - down) / (2.0 * kAlphaStep);
  out.discrepancy = std::fabs(out.alpha - out.crosscheck);
  return out;
}

AlphaSample alpha_of_beta(const MultifractalProblem& problem, double beta) {
  return alpha_of_beta(problem, beta, solve_t(problem, beta).t);
}

std::vector<double> BetaGrid::values() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step)) {
    throw ValidationError("beta grid must be finite");
  }
  if (step <= 0.0) throw ValidationError("beta grid step must be positive");
  if (min > max) throw ValidationError("beta grid min exceeds max");
  const double count = std::floor((max - min) / step + 1e-9);
  if (count > 1e6) throw ValidationError("beta grid has more than 10^6 points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count) + 3);
  for (long long k = 0; k <= static_cast<long long>(count); ++k) {
    out.push_back(static_cast<double>(std::llround((min + static_cast<double>(k) * step) * 1e9)) / 1e9);
  }
  out.push_back(0.0);
  out.push_back(1.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double PressureCurve::min_second_difference() const {
  double out = kInf;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double ratio = (beta[i + 1] - beta[i]) / (beta[i] - beta[i - 1]);
    out = std::min(out, (t[i + 1] - t[i]) - (t[i] - t[i - 1]) * ratio);
  }
  return out;
}

double PressureCurve::max_alpha_increase() const {
  double out = -kInf;
  for (std::size_t i = 1; i < alpha.size(); ++i) out = std::max(out, alpha[i] - alpha[i - 1]);
  return out;
}

PressureCurve pressure_curve(const MultifractalProblem& problem, const std::vector<double>& grid, unsigned threads) {
  if (grid.empty()) throw ValidationError("beta grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("beta grid must be sorted");
  PressureCurve curve;
  const std::size_t n = grid.size();
  curve.beta = grid;
  curve.t.resize(n);
  curve.t_error.resize(n);
  curve.alpha.resize(n);
  curve.alpha_crosscheck.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const TSolution sol = solve_t(problem, grid[i]);
    const AlphaSample a = alpha_of_beta(problem, grid[i], sol.t);
    curve.t[i] = sol.t;
    curve.t_error[i] = sol.error();
    curve.alpha[i] = a.alpha;
    curve.alpha_crosscheck[i] = a.crosscheck;
  });
  const auto [lo, hi] = std::minmax_element(curve.alpha.begin(), curve.alpha.end());
  curve.degenerate = *hi - *lo <= 1e-6;
  return curve;
}

double legendre_direct(const PressureCurve& curve, double alpha) {
  double out = kInf;
  for (std::size_t j = 0; j < curve.t.size(); ++j) out = std::min(out, curve.t[j] + curve.beta[j] * alpha);
  return out;
}

SpectrumCurve legendre_spectrum(const PressureCurve& curve) {
  if (curve.t.size() >= 3 && curve.min_second_difference() < -1e-8) {
    throw NumericalError("t samples are not convex beyond tolerance");
  }
  const auto zero = std::find(curve.beta.begin(), curve.beta.end(), 0.0);
  if (zero == curve.beta.end()) throw NumericalError("beta grid must contain 0");
  const auto i0 = static_cast<std::size_t>(zero - curve.beta.begin());

  SpectrumCurve out{};
  out.apex_alpha = curve.alpha[i0];
  out.apex_f = curve.t[i0];
  out.alpha_min = kInf;
  out.alpha_max = -kInf;
  out.max_direct_gap = 0.0;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    SpectrumSample s{};
    s.beta = curve.beta[i];
    s.alpha = curve.alpha[i];
    s.f_raw = curve.t[i] + s.beta * s.alpha;
    s.f = std::max(0.0, s.f_raw);
    s.f_direct = legendre_direct(curve, s.alpha);
    s.error = curve.t_error[i] + std::fabs(s.beta) * std::fabs(s.alpha - curve.alpha_crosscheck[i]);
    out.alpha_min = std::min(out.alpha_min, s.alpha);
    out.alpha_max = std::max(out.alpha_max, s.alpha);
    out.max_direct_gap = std::max(out.max_direct_gap, std::fabs(s.f_raw - s.f_direct));
    out.samples.push_back(s);
  }
  return out;
}

SpectrumRange spectrum_range(const MultifractalProblem& problem, int L, double beta_max) {
  if (L < 1) throw ValidationError("cycle length L must be at least 1");
  if (!(beta_max > 0.0)) throw ValidationError("beta_max must be positive");
  const Alphabet& alphabet = problem.phi().alphabet();
  problem.options().budget.check(alphabet, L);

  SpectrumRange out{};
  out.cycle_minus = kInf;
  out.cycle_plus = -kInf;
  out.cycle_length = L;
  for (int len = 1; len <= L; ++len) {
    for_each_word(
        alphabet, len,
        [&](std::span<const int> w) {
          const Word word(std::vector<int>(w.begin(), w.end()));
          const double ratio = birkhoff_sum_periodic(problem.psi(), word) / birkhoff_sum_periodic(problem.phi(), word);
          out.cycle_minus = std::min(out.cycle_minus, ratio);
          out.cycle_plus = std::max(out.cycle_plus, ratio);
        },
        problem.options().budget);
  }
  out.beta_max = beta_max;
  out.asymptotic_minus = alpha_of_beta(problem, beta_max).alpha;
  out.asymptotic_plus = alpha_of_beta(problem, -beta_max).alpha;
  out.alpha_minus = std::min(out.cycle_minus, out.asymptotic_minus);
  out.alpha_plus = std::max(out.cycle_plus, out.asymptotic_plus);
  out.disagreement =
      std::max(std::fabs(out.cycle_minus - out.asymptotic_minus), std::fabs(out.cycle_plus - out.asymptotic_plus));
  out.disagreement_flag = out.disagreement > 1e-3;
  return out;
}

SpectrumClass classify_spectrum(const SpectrumRange& range, double t0) {
  const bool degenerate = range.alpha_plus - range.alpha_minus <= 1e-6;
  return {degenerate, !degenerate || std::fabs(range.alpha_minus - t0) <= 1e-5};
}

}  // namespace multifrac
