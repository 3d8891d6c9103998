#pragma once

#include <memory>
#include <vector>

#include "multifrac/distribution.hpp"
#include "multifrac/ifs.hpp"
#include "multifrac/multifractal.hpp"

namespace multifrac {

/// Two systems with the same alphabet: f may have a Cantor attractor, g must
/// tile its hull so that its geometric measure is Lebesgue there.
class ConjugacyPair {
 public:
  /// Throws ValidationError on different sizes or when g does not tile its
  /// hull within 1e-12.
  static ConjugacyPair create(std::shared_ptr<const Ifs> f, std::shared_ptr<const Ifs> g,
                              const PressureOptions& options = {});

  const Ifs& f() const noexcept { return *f_; }
  const Ifs& g() const noexcept { return *g_; }
  const std::shared_ptr<const Ifs>& f_ptr() const noexcept { return f_; }
  const std::shared_ptr<const Ifs>& g_ptr() const noexcept { return g_; }
  /// Gibbs measure of the geometric potential of g (exact for affine g).
  const MarkovMeasure& g_measure() const noexcept { return g_measure_; }
  const PressureOptions& options() const noexcept { return options_; }

 private:
  ConjugacyPair(std::shared_ptr<const Ifs> f, std::shared_ptr<const Ifs> g, MarkovMeasure mu, PressureOptions options)
      : f_(std::move(f)), g_(std::move(g)), g_measure_(std::move(mu)), options_(options) {}

  std::shared_ptr<const Ifs> f_;
  std::shared_ptr<const Ifs> g_;
  MarkovMeasure g_measure_;
  PressureOptions options_;
};

struct ThetaValue {
  double value;
  double error;
  bool boundary;  // x had two f-codings
};

/// Theta = pi_g o pi_f^{-1} at depth n. Points left (right) of the f-attractor
/// map to the left (right) end of the g-hull. Throws GapPointError for points
/// in an internal gap of the f-attractor.
ThetaValue theta(const ConjugacyPair& pair, double x, int n);

struct ThetaDistribution {
  double value;
  double error;
  double residual;  // |value - theta|
  double bound;     // error + theta error
};

/// Theta evaluated as the distribution function of mu_{phi_g} o pi_f^{-1}.
ThetaDistribution theta_as_distribution(const ConjugacyPair& pair, double x, int n);

struct FunctionalResidual {
  double max_residual;
  /// Largest residual minus its error bound; <= 0 when all checks hold.
  double max_excess;
  int checked;
  int skipped;  // sample points in gaps of the f-attractor
};

/// Checks Theta(f_i(x)) = g_i(Theta(x)) for every branch i and sample x.
FunctionalResidual functional_equation_residual(const ConjugacyPair& pair, const std::vector<double>& xs, int n);

/// Multifractal problem with phi the geometric potential of f and psi that of g.
MultifractalProblem conjugacy_problem(const ConjugacyPair& pair);

/// Pressure curve and Legendre spectrum of the Hoelder exponents of Theta.
struct ConjugacySpectrum {
  PressureCurve curve;
  SpectrumCurve spectrum;
};

ConjugacySpectrum conjugacy_spectrum(const ConjugacyPair& pair, const std::vector<double>& grid, unsigned threads = 1);

}  // namespace multifrac
