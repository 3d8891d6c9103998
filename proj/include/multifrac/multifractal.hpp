#pragma once

#include <vector>

#include "multifrac/thermo.hpp"

namespace multifrac {

/// The pair (phi, psi) of the pressure equation P(t phi + beta psi) = 0.
/// psi is stored normalized to zero pressure; psi_shift is the P(psi) that
/// was subtracted. Both potentials are tabulated once at a shared depth.
class MultifractalProblem {
 public:
  /// Throws ValidationError when phi is not strictly negative or the
  /// alphabets differ.
  static MultifractalProblem create(const Potential& phi, const Potential& psi, const PressureOptions& options = {});

  const Potential& phi() const noexcept { return phi_; }
  const Potential& psi() const noexcept { return psi_; }
  double psi_shift() const noexcept { return psi_shift_; }
  const PressureOptions& options() const noexcept { return options_; }
  int depth() const noexcept { return phi_tables_.mid.depth(); }
  /// True when both tables are exact (no approximation of geometric parts).
  bool exact() const noexcept { return phi_tables_.exact && psi_tables_.exact; }
  const TableBracket& phi_tables() const noexcept { return phi_tables_; }
  const TableBracket& psi_tables() const noexcept { return psi_tables_; }

  /// Spectral pressure of t phi + beta psi from the cached tables.
  PressureEstimate pressure(double t, double beta, bool bounds = false) const;

 private:
  MultifractalProblem(Potential phi, Potential psi, double shift, PressureOptions options, TableBracket a,
                      TableBracket b);

  Potential phi_;
  Potential psi_;
  double psi_shift_;
  PressureOptions options_;
  TableBracket phi_tables_;
  TableBracket psi_tables_;
};

struct TSolution {
  double t;
  /// Certified enclosure of the root: from the final bisection bracket for
  /// exact tables, from the roots of the bracketing tables otherwise.
  double lower;
  double upper;
  /// Pressure at the returned t.
  double residual;

  double error() const noexcept;
};

/// Root of beta -> P(t phi + beta psi) in t by bisection. The initial
/// bracket [-1, 2] is expanded geometrically until the pressure changes sign.
TSolution solve_t(const MultifractalProblem& problem, double beta);

struct AlphaSample {
  double alpha;       // (int psi) / (int phi) under the equilibrium state
  double crosscheck;  // -(t(beta + h) - t(beta - h)) / (2h)
  double discrepancy;
};

inline constexpr double kAlphaStep = 1e-4;

AlphaSample alpha_of_beta(const MultifractalProblem& problem, double beta, double t);
AlphaSample alpha_of_beta(const MultifractalProblem& problem, double beta);

/// Sorted grid of beta values. Points are snapped to multiples of 1e-9 so
/// that decimal steps reproduce exactly; 0 and 1 are always included.
struct BetaGrid {
  double min;
  double max;
  double step;

  /// Throws ValidationError on step <= 0, min > max or more than 10^6 points.
  std::vector<double> values() const;
};

struct PressureCurve {
  std::vector<double> beta;
  std::vector<double> t;
  std::vector<double> t_error;
  std::vector<double> alpha;
  std::vector<double> alpha_crosscheck;
  bool degenerate = false;

  /// Smallest discrete second difference of t (divided by the squared steps).
  double min_second_difference() const;
  /// Largest increase of alpha between consecutive samples.
  double max_alpha_increase() const;
};

/// Samples t and alpha on the grid; grid points are independent and are
/// distributed over `threads` workers.
PressureCurve pressure_curve(const MultifractalProblem& problem, const std::vector<double>& grid,
                             unsigned threads = 1);

struct SpectrumSample {
  double beta;
  double alpha;
  double f_raw;     // t + beta * alpha
  double f;         // clamped at 0
  double f_direct;  // inf over the grid of t(b) + b * alpha
  double error;
};

struct SpectrumCurve {
  std::vector<SpectrumSample> samples;
  double alpha_min;
  double alpha_max;
  double apex_alpha;  // alpha(0)
  double apex_f;      // t(0)
  /// Largest |f_raw - f_direct| over the samples.
  double max_direct_gap;
};

/// Parametric Legendre spectrum f(alpha(beta)) = t(beta) + beta alpha(beta)
/// with the direct evaluation inf_b (t(b) + b alpha) alongside. Throws
/// NumericalError when t is not convex within 1e-8 or the grid lacks 0.
SpectrumCurve legendre_spectrum(const PressureCurve& curve);

/// inf over the curve samples of t(b) + b * alpha.
double legendre_direct(const PressureCurve& curve, double alpha);

struct SpectrumRange {
  double alpha_minus;
  double alpha_plus;
  double cycle_minus;
  double cycle_plus;
  int cycle_length;
  double asymptotic_minus;  // alpha(beta_max)
  double asymptotic_plus;   // alpha(-beta_max)
  double beta_max;
  double disagreement;
  bool disagreement_flag;  // disagreement > 1e-3
};

/// Range [alpha_-, alpha_+] from cycle ratios S psi / S phi over words of
/// length <= L and from alpha(+-beta_max); the wider of the two is reported.
SpectrumRange spectrum_range(const MultifractalProblem& problem, int L, double beta_max);

struct SpectrumClass {
  bool degenerate;
  /// For degenerate spectra, whether alpha_- matches t(0) within 1e-5.
  bool apex_consistent;
};

SpectrumClass classify_spectrum(const SpectrumRange& range, double t0);

}  // namespace multifrac
