#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multifrac/symbolic.hpp"

namespace multifrac {

/// Closed interval [lo, hi]. Also used for the open set U, read as (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double diameter() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One contracting, orientation-preserving branch. Affine maps are
/// x -> ratio * x + offset; Moebius maps are x -> (a x + b) / (c x + d).
class BranchMap {
 public:
  enum class Kind { affine, moebius };

  static BranchMap affine(double ratio, double offset);
  static BranchMap moebius(double a, double b, double c, double d);

  Kind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }
  double determinant() const noexcept { return a_ * d_ - b_ * c_; }

  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  double log_derivative(double x) const noexcept;

  /// True when c x + d vanishes somewhere on the closed interval.
  bool has_pole_in(const Interval& x) const noexcept;

  /// Enclosure of the image of x, rounded outward. Affine images that are
  /// exact in floating point are not widened. Assumes the map is increasing
  /// on x.
  Interval image(const Interval& x) const noexcept;

 private:
  BranchMap(Kind kind, double a, double b, double c, double d)
      : kind_(kind), a_(a), b_(b), c_(c), d_(d) {}

  Kind kind_;
  double a_, b_, c_, d_;
};

/// Raw description of an iterated function system as read from a config.
/// Missing hull defaults to the convex hull of the attractor; missing osc
/// defaults to the interior of the hull.
struct IfsSpec {
  std::vector<BranchMap> branches;
  std::optional<Interval> hull;
  std::optional<Interval> osc;
};

struct ValidationIssue {
  std::string kind;  // "alphabet", "orientation", "contraction", "invariance", "osc", "overlap", "order", "domain"
  int first = 0;     // 1-based branch index, 0 when not applicable
  int second = 0;
  std::string message;
};

struct ValidationReport {
  bool passed = false;
  std::vector<double> contraction_factors;
  std::vector<ValidationIssue> issues;
  Interval hull;
  Interval osc;

  /// One line per issue; "ok" when passed.
  std::string summary() const;
};

/// Checks orientation, contraction and invariance on the hull, and the open
/// set condition (invariance and pairwise disjointness of images of U).
/// Never throws on bad input; problems are reported as issues.
ValidationReport validate_ifs(const IfsSpec& spec);

/// A validated, immutable iterated function system.
class Ifs {
 public:
  /// Throws ValidationError carrying the report summary on failure.
  static Ifs create(const IfsSpec& spec);
  static std::shared_ptr<const Ifs> make_shared(const IfsSpec& spec);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int size() const noexcept { return alphabet_.size(); }
  /// Branch for a 1-based symbol.
  const BranchMap& branch(int symbol) const { return branches_[static_cast<std::size_t>(symbol - 1)]; }
  const std::vector<BranchMap>& branches() const noexcept { return branches_; }
  const Interval& hull() const noexcept { return hull_; }
  const Interval& osc() const noexcept { return osc_; }
  const std::vector<double>& contraction_factors() const noexcept { return contraction_; }
  double max_contraction() const noexcept;
  bool all_affine() const noexcept;

  /// Depth-1 images cover the hull with endpoint gaps at most tol.
  bool tiles_hull(double tol = 1e-12) const noexcept;

  /// [min of attractor, max of attractor]: the fixed points of the first and
  /// last branch.
  Interval attractor_bounds() const;

  /// Upper bound on |log phi_i'| over the hull, over all branches.
  double max_abs_log_derivative() const noexcept { return max_abs_log_derivative_; }

 private:
  Ifs(std::vector<BranchMap> branches, Interval hull, Interval osc, std::vector<double> contraction);

  Alphabet alphabet_;
  std::vector<BranchMap> branches_;
  Interval hull_;
  Interval osc_;
  std::vector<double> contraction_;
  double max_abs_log_derivative_ = 0.0;
};

struct CylinderInterval {
  Word word;
  Interval interval;

  double diameter() const noexcept { return interval.diameter(); }
};

/// phi_{w_1} o ... o phi_{w_n}(x), outward rounded.
Interval compose_image(const Ifs& ifs, std::span<const int> word, const Interval& x);

/// The cylinder image phi_gamma(X) of a word.
CylinderInterval cylinder_interval(const Ifs& ifs, const Word& word);

struct CodingPoint {
  double point;
  double error_radius;
};

/// Midpoint of the cylinder interval with half its diameter as error.
CodingPoint coding_point(const Ifs& ifs, const Word& word);

struct DigitExpansion {
  Word primary;
  std::optional<Word> secondary;
  bool boundary = false;
};

/// Depth-n words whose cylinder interval contains x. Throws GapPointError
/// when x leaves the cylinder cover at some depth.
DigitExpansion digits_of_point(const Ifs& ifs, double x, int n);

/// Fixed point of phi_{w_1} o ... o phi_{w_n}: closed form for affine
/// compositions, bisection inside the cylinder (tolerance 1e-14) otherwise.
double fixed_point(const Ifs& ifs, const Word& word);

/// log (phi_{w_1} o ... o phi_{w_n})'(x) by the chain rule.
double log_derivative(const Ifs& ifs, std::span<const int> word, double x);

/// log of the derivative of the composition at its fixed point, which is the
/// Birkhoff sum of the geometric potential at the periodic point.
double log_derivative_at(const Ifs& ifs, const Word& word);

}  // namespace multifrac
