#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "multifrac/ifs.hpp"
#include "multifrac/symbolic.hpp"

namespace multifrac {

/// A function on the full shift that depends only on the first `depth`
/// symbols, stored in lexicographic order of those symbols.
class LocalTable {
 public:
  LocalTable(Alphabet alphabet, int depth, std::vector<double> values);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t index) const { return values_[index]; }

  /// Value on the cylinder of the first `depth` symbols of word.
  double value(std::span<const int> word) const;

  /// Min / max over entries whose first `len` symbols have base-s rank `prefix`.
  double prefix_min(int len, std::size_t prefix) const { return prefix_min_[static_cast<std::size_t>(len)][prefix]; }
  double prefix_max(int len, std::size_t prefix) const { return prefix_max_[static_cast<std::size_t>(len)][prefix]; }

  /// The same function tabulated at a larger depth.
  LocalTable refined(int depth) const;
  LocalTable shifted(double c) const;

 private:
  Alphabet alphabet_;
  int depth_;
  std::vector<double> values_;
  std::vector<std::vector<double>> prefix_min_;
  std::vector<std::vector<double>> prefix_max_;
};

/// Bounds C theta^n on the variation of a potential over depth-n cylinders.
struct HoelderBound {
  double constant;
  double theta;
};

/// A Hoelder potential on the full shift: a locally constant table, per
/// symbol log-weights, or the geometric potential log phi'_{w_1}(pi(sigma w))
/// of an IFS (optionally scaled). Every kind carries an additive shift.
class Potential {
 public:
  enum class Kind { locally_constant, symbol_log_weights, geometric };

  static Potential locally_constant(int alphabet_size, int depth, std::vector<double> table);
  static Potential symbol_log_weights(std::vector<double> values);
  static Potential geometric(std::shared_ptr<const Ifs> ifs, double scale = 1.0);

  Kind kind() const noexcept { return kind_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  double shift() const noexcept { return shift_; }
  double scale() const noexcept { return scale_; }
  const std::optional<HoelderBound>& hoelder_bound() const noexcept { return hoelder_; }

  /// Geometric kind only; nullptr otherwise.
  const Ifs* ifs() const noexcept { return ifs_.get(); }
  const std::shared_ptr<const Ifs>& ifs_ptr() const noexcept { return ifs_; }

  /// Raw table (without shift) for the table kinds.
  const LocalTable* table() const noexcept { return table_.get(); }

  Potential shifted(double c) const;
  Potential with_hoelder_bound(HoelderBound bound) const;

  /// The potential as an exact table (shift applied) when it is locally
  /// constant. Geometric potentials of all-affine systems are constant per
  /// first symbol and qualify.
  std::optional<LocalTable> exact_table() const;

  /// Depth of exact local constancy; 0 when the potential is not locally constant.
  int locality() const noexcept;

  /// True when f < 0 everywhere.
  bool strictly_negative() const;

 private:
  Potential(Kind kind, Alphabet alphabet) : kind_(kind), alphabet_(alphabet) {}

  Kind kind_;
  Alphabet alphabet_;
  std::shared_ptr<const LocalTable> table_;
  std::shared_ptr<const Ifs> ifs_;
  double scale_ = 1.0;
  double shift_ = 0.0;
  std::optional<HoelderBound> hoelder_;
};

/// S_n f at the periodic point gamma gamma ... with n = |gamma|.
double birkhoff_sum_periodic(const Potential& f, const Word& gamma);

struct CylinderBounds {
  enum class Source { structural, hoelder };

  double lower;
  double upper;
  Source source = Source::structural;

  double width() const noexcept { return upper - lower; }
};

/// Certified bounds on inf / sup of S_{|gamma|} f over the cylinder [gamma],
/// from all extensions of gamma to probe_depth. Table potentials use the
/// exact table (prefix extrema for symbols beyond the probe); geometric
/// potentials use monotonicity of the composed derivative on each tail
/// cylinder. A Hoelder bound, when present, further intersects the result.
CylinderBounds cylinder_bounds(const Potential& f, const Word& gamma, int probe_depth,
                               const EnumerationBudget& budget = {});

/// Bounds S_c f over [gamma tail] while the symbols of gamma are prepended
/// one at a time, innermost (gamma_c) first. Used to sweep all prefixes of a
/// fixed tail with a depth-first search.
class SumWalker {
 public:
  SumWalker(const Potential& f, const Word& tail);

  void push_front(int symbol);
  void pop_front();

  std::size_t length() const noexcept { return states_.size() - 1; }
  double lower() const noexcept;
  double upper() const noexcept;

 private:
  struct State {
    double lo;  // table kinds: running lower sum; geometric: left endpoint
    double hi;
    double log_lo;  // geometric: accumulated log-derivative at lo / hi
    double log_hi;
  };

  const Potential* f_;
  const LocalTable* table_ = nullptr;
  std::vector<int> reversed_;  // tail reversed, then prepended symbols
  std::vector<State> states_;
  double pad_per_term_ = 0.0;
};

}  // namespace multifrac
