#include "multifrac/conjugacy.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "multifrac/errors.hpp"

namespace multifrac {

ConjugacyPair ConjugacyPair::create(std::shared_ptr<const Ifs> f, std::shared_ptr<const Ifs> g,
                                    const PressureOptions& options) {
  if (!f || !g) throw ValidationError("conjugacy needs both systems");
  if (f->size() != g->size()) throw ValidationError("conjugacy systems must have the same number of branches");
  if (!g->tiles_hull(1e-12)) throw ValidationError("the g system must tile its hull");
  MarkovMeasure mu = MarkovMeasure::from_potential(Potential::geometric(g), options);
  return ConjugacyPair(std::move(f), std::move(g), std::move(mu), options);
}

ThetaValue theta(const ConjugacyPair& pair, double x, int n) {
  if (n < 1) throw ValidationError("theta depth must be at least 1");
  if (std::isnan(x)) throw ValidationError("x is NaN");
  const Interval lambda = pair.f().attractor_bounds();
  if (x < lambda.lo) return {pair.g().hull().lo, 0.0, false};
  if (x > lambda.hi) return {pair.g().hull().hi, 0.0, false};
  const DigitExpansion digits = digits_of_point(pair.f(), x, n);
  Interval I = cylinder_interval(pair.g(), digits.primary).interval;
  if (digits.secondary) {
    const Interval J = cylinder_interval(pair.g(), *digits.secondary).interval;
    I = {std::min(I.lo, J.lo), std::max(I.hi, J.hi)};
  }
  return {I.midpoint(), 0.5 * I.diameter(), digits.boundary};
}

ThetaDistribution theta_as_distribution(const ConjugacyPair& pair, double x, int n) {
  const StaircaseSample F = distribution_function(pair.g_measure(), pair.f(), x, n);
  const ThetaValue th = theta(pair, x, n);
  return {F.F, F.error, std::fabs(F.F - th.value), F.error + th.error};
}

FunctionalResidual functional_equation_residual(const ConjugacyPair& pair, const std::vector<double>& xs, int n) {
  FunctionalResidual out{0.0, -1.0, 0, 0};
  bool any = false;
  for (double x : xs) {
    ThetaValue base{};
    try {
      base = theta(pair, x, n);
    } catch (const GapPointError&) {
      ++out.skipped;
      continue;
    }
    for (int i = 1; i <= pair.f().size(); ++i) {
      const ThetaValue lhs = theta(pair, pair.f().branch(i)(x), n);
      const double rhs = pair.g().branch(i)(base.value);
      const double residual = std::fabs(lhs.value - rhs);
      const double bound = lhs.error + pair.g().contraction_factors()[static_cast<std::size_t>(i - 1)] * base.error +
                           4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(rhs));
      out.max_residual = std::max(out.max_residual, residual);
      out.max_excess = any ? std::max(out.max_excess, residual - bound) : residual - bound;
      any = true;
      ++out.checked;
    }
  }
  if (!any) out.max_excess = 0.0;
  return out;
}

MultifractalProblem conjugacy_problem(const ConjugacyPair& pair) {
  return MultifractalProblem::create(Potential::geometric(pair.f_ptr()), Potential::geometric(pair.g_ptr()),
                                     pair.options());
}

ConjugacySpectrum conjugacy_spectrum(const ConjugacyPair& pair, const std::vector<double>& grid, unsigned threads) {
  const MultifractalProblem problem = conjugacy_problem(pair);
  PressureCurve curve = pressure_curve(problem, grid, threads);
  SpectrumCurve spectrum = legendre_spectrum(curve);
  return {std::move(curve), std::move(spectrum)};
}

}  // namespace multifrac
