#pragma once

#include <stdexcept>
#include <string>

namespace multifrac {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration would visit more words than the configured budget allows.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a structural requirement (contraction, open set
/// condition, table sizes, grid ordering, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: root bracket exhausted, eigen-solver did
/// not converge, or a computed curve broke a required shape constraint.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The queried point lies in a gap of the attractor's cylinder cover.
class GapPointError : public Error {
 public:
  GapPointError(const std::string& what, double left_flank, double right_flank)
      : Error(what), left_flank_(left_flank), right_flank_(right_flank) {}

  /// Right endpoint of the last cylinder left of the point.
  double left_flank() const noexcept { return left_flank_; }
  /// Left endpoint of the first cylinder right of the point.
  double right_flank() const noexcept { return right_flank_; }

 private:
  double left_flank_;
  double right_flank_;
};

}  // namespace multifrac
