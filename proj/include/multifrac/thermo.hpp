#pragma once

#include <optional>
#include <span>
#include <vector>

#include "multifrac/potential.hpp"

namespace multifrac {

/// t * phi + beta * psi.
struct CombinedPotential {
  double t;
  double beta;
  Potential phi;
  Potential psi;
};

struct PressureEstimate {
  enum class Method { periodic, spectral };

  double value;
  double lower;
  double upper;
  int depth;
  Method method;

  double width() const noexcept { return upper - lower; }
};

struct PressureOptions {
  /// Depth of the locally constant approximation of non-table potentials.
  int approximation_depth = 8;
  /// Relative change of the Rayleigh quotient that counts as converged.
  double eigen_tolerance = 1e-13;
  int max_iterations = 200000;
  /// Symbolic tail length for pressure_periodic brackets on geometric
  /// potentials; negative means "same as the pressure depth".
  int tail_depth = -1;
  EnumerationBudget budget{};
};

/// Partition-function pressure at depth n. The value is the periodic-orbit
/// estimate (1/n) log sum exp(S_n f(gamma gamma ...)). The bracket is the
/// intersection over depths d <= n of ratio bounds
///   inf (L^d 1 / L^b 1)^(1/a) <= exp P <= sup (L^d 1 / L^b 1)^(1/a),
/// with a + b = d, evaluated on tail cylinders with certified sum bounds.
PressureEstimate pressure_periodic(const CombinedPotential& f, int n, const PressureOptions& options = {});

/// Transfer-matrix pressure. Exact (up to the eigen-solver's Collatz-Wielandt
/// bracket) for table potentials; geometric parts of non-affine systems are
/// enclosed between inf / sup tables at options.approximation_depth.
PressureEstimate pressure_spectral(const CombinedPotential& f, const PressureOptions& options = {});

/// Perron data of the s^m x s^m transfer matrix of a depth-m table, whose
/// states are depth-m words with u -> u_2..u_m j weighted by exp(f(u)).
struct PerronData {
  double log_radius;
  double log_lower;  // Collatz-Wielandt bounds
  double log_upper;
  std::vector<double> right;
  std::vector<double> left;
  int iterations;
};

PerronData perron_data(const LocalTable& table, const PressureOptions& options = {}, bool with_left = true);

/// Locally constant enclosures of a combined potential at a common depth.
struct TableBracket {
  LocalTable lower;
  LocalTable upper;
  LocalTable mid;
  bool exact;
};

TableBracket table_bracket(const CombinedPotential& f, const PressureOptions& options = {});

/// Locally constant enclosure of a single potential at depth m.
TableBracket potential_tables(const Potential& f, int depth);

/// Depth at which phi and psi are tabulated together: their exact locality,
/// raised to approximation_depth when either is not locally constant.
int common_depth(const Potential& phi, const Potential& psi, int approximation_depth);

/// t * a + beta * b on tables of equal depth, with the bounds combined
/// according to the signs of the coefficients.
TableBracket combine_tables(double t, const TableBracket& a, double beta, const TableBracket& b);

/// Spectral pressure of a table bracket. With bounds == false only the
/// midpoint table is solved and lower / upper come from its own
/// Collatz-Wielandt ratios.
PressureEstimate pressure_from_tables(const TableBracket& tables, const PressureOptions& options = {},
                                      bool bounds = true);

/// Stationary Markov measure of a depth-m table: the Gibbs / equilibrium
/// measure of that table after normalization to zero pressure.
class MarkovMeasure {
 public:
  static MarkovMeasure from_table(const LocalTable& table, const PressureOptions& options = {},
                                  bool approximate = false);
  /// Gibbs measure of a potential: exact for table potentials and affine
  /// geometric potentials, otherwise built from the midpoint table at
  /// options.approximation_depth and flagged approximate.
  static MarkovMeasure from_potential(const Potential& psi, const PressureOptions& options = {});

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int depth() const noexcept { return depth_; }
  /// The pressure P(psi) that was subtracted.
  double pressure_shift() const noexcept { return pressure_shift_; }
  bool approximate() const noexcept { return approximate_; }
  /// Perron eigenvalue (exp of the pressure shift).
  double normalization_constant() const noexcept;

  const std::vector<double>& stationary() const noexcept { return stationary_; }
  const std::vector<double>& right() const noexcept { return right_; }
  const std::vector<double>& left() const noexcept { return left_; }

  /// Mass of the cylinder [word]; the empty word has mass 1.
  double mass(std::span<const int> word) const;
  double mass(const Word& word) const { return mass(word.symbols()); }
  /// Transition probability from the depth-m state `state` on symbol j.
  double transition(std::size_t state, int symbol) const {
    return transitions_[state * static_cast<std::size_t>(alphabet_.size()) + static_cast<std::size_t>(symbol - 1)];
  }

 private:
  MarkovMeasure(Alphabet alphabet, int depth) : alphabet_(alphabet), depth_(depth) {}

  Alphabet alphabet_;
  int depth_;
  double pressure_shift_ = 0.0;
  bool approximate_ = false;
  std::vector<double> right_;
  std::vector<double> left_;
  std::vector<double> stationary_;
  std::vector<double> transitions_;
  std::vector<std::vector<double>> marginals_;  // by prefix length 0..m
};

double gibbs_cylinder_measure(const MarkovMeasure& mu, const Word& gamma);

struct GibbsProbe {
  std::vector<int> depths;
  std::vector<double> maxima;
  double bound;  // max over depths
};

/// Per-depth maxima of |log mu[gamma] - S_n psi(gamma gamma ...)|, for a
/// psi already normalized to zero pressure.
GibbsProbe gibbs_constant_probe(const MarkovMeasure& mu, const Potential& psi, std::span<const int> depths,
                                const EnumerationBudget& budget = {});

/// psi - P(psi), with P computed spectrally.
Potential normalize_potential(const Potential& psi, const PressureOptions& options = {});

struct EquilibriumIntegrals {
  double phi;
  double psi;
};

/// Integrals of the depth-m tables of phi and psi against the equilibrium
/// state of t phi + beta psi.
EquilibriumIntegrals equilibrium_integrals(double t, double beta, const Potential& phi, const Potential& psi,
                                           int depth, const PressureOptions& options = {});

}  // namespace multifrac
