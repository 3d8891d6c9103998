#include "multifrac/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "multifrac/errors.hpp"

namespace multifrac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTouchTol = 1e-12;

double down(double y, int ulps) {
  for (int i = 0; i < ulps; ++i) y = std::nextafter(y, -kInf);
  return y;
}

double up(double y, int ulps) {
  for (int i = 0; i < ulps; ++i) y = std::nextafter(y, kInf);
  return y;
}

// ratio * x + offset together with an estimate of (exact - rounded).
std::pair<double, double> affine_with_error(double ratio, double offset, double x) {
  const double p = ratio * x;
  const double e1 = std::fma(ratio, x, -p);
  const double y = p + offset;
  const double bp = y - p;
  const double e2 = (p - (y - bp)) + (offset - bp);
  return {y, e1 + e2};
}

double lower_enclosure(double y, double err) {
  if (err >= 0.0) return y;
  double lo = std::nextafter(y, -kInf);
  while (y - lo < -err) lo = std::nextafter(lo, -kInf);
  return lo;
}

double upper_enclosure(double y, double err) {
  if (err <= 0.0) return y;
  double hi = std::nextafter(y, kInf);
  while (hi - y < err) hi = std::nextafter(hi, kInf);
  return hi;
}

// Fixed point of an increasing contraction by iteration from a seed; used
// only to default the hull when none is given.
double iterate_to_fixed_point(const BranchMap& m, double seed) {
  double x = seed;
  for (int i = 0; i < 2000; ++i) {
    const double next = m(x);
    if (!std::isfinite(next)) return next;
    if (next == x) return x;
    x = next;
  }
  return x;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

BranchMap BranchMap::affine(double ratio, double offset) {
  return BranchMap(Kind::affine, ratio, offset, 0.0, 1.0);
}

BranchMap BranchMap::moebius(double a, double b, double c, double d) {
  return BranchMap(Kind::moebius, a, b, c, d);
}

double BranchMap::operator()(double x) const noexcept {
  if (kind_ == Kind::affine) return a_ * x + b_;
  return std::fma(a_, x, b_) / std::fma(c_, x, d_);
}

double BranchMap::derivative(double x) const noexcept {
  if (kind_ == Kind::affine) return a_;
  const double den = std::fma(c_, x, d_);
  return determinant() / (den * den);
}

double BranchMap::log_derivative(double x) const noexcept {
  if (kind_ == Kind::affine) return std::log(a_);
  return std::log(determinant()) - 2.0 * std::log(std::fabs(std::fma(c_, x, d_)));
}

bool BranchMap::has_pole_in(const Interval& x) const noexcept {
  if (kind_ == Kind::affine || c_ == 0.0) return d_ == 0.0;
  const double pole = -d_ / c_;
  return x.lo <= pole && pole <= x.hi;
}

Interval BranchMap::image(const Interval& x) const noexcept {
  if (kind_ == Kind::affine) {
    const auto [ylo, elo] = affine_with_error(a_, b_, x.lo);
    const auto [yhi, ehi] = affine_with_error(a_, b_, x.hi);
    return {lower_enclosure(ylo, elo), upper_enclosure(yhi, ehi)};
  }
  return {down((*this)(x.lo), 2), up((*this)(x.hi), 2)};
}

std::string ValidationReport::summary() const {
  if (passed) return "ok";
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.kind + ": " + issue.message;
  }
  return out;
}

ValidationReport validate_ifs(const IfsSpec& spec) {
  ValidationReport report;
  auto fail = [&](std::string kind, int i, int j, std::string msg) {
    report.issues.push_back({std::move(kind), i, j, std::move(msg)});
  };

  const int s = static_cast<int>(spec.branches.size());
  if (s < 2) {
    fail("alphabet", 0, 0, "need at least 2 branches, got " + std::to_string(s));
    return report;
  }
  for (int i = 0; i < s; ++i) {
    const auto& br = spec.branches[static_cast<std::size_t>(i)];
    const bool finite = std::isfinite(br.a()) && std::isfinite(br.b()) && std::isfinite(br.c()) &&
                        std::isfinite(br.d());
    if (!finite) {
      fail("domain", i + 1, 0, "branch " + std::to_string(i + 1) + " has non-finite coefficients");
    } else if (br.determinant() <= 0.0) {
      fail("orientation", i + 1, 0,
           "branch " + std::to_string(i + 1) + " is not orientation preserving (determinant " +
               fmt(br.determinant()) + ")");
    }
  }
  if (!report.issues.empty()) return report;

  // Resolve hull and open set. A missing hull is the convex hull of the
  // attractor, spanned by the fixed points of the outer branches.
  Interval hull;
  if (spec.hull) {
    hull = *spec.hull;
  } else {
    const double seed = spec.osc ? spec.osc->midpoint() : 0.0;
    hull = {iterate_to_fixed_point(spec.branches.front(), seed),
            iterate_to_fixed_point(spec.branches.back(), seed)};
  }
  const Interval osc = spec.osc ? *spec.osc : hull;
  report.hull = hull;
  report.osc = osc;
  if (!(std::isfinite(hull.lo) && std::isfinite(hull.hi)) || !(hull.lo < hull.hi)) {
    fail("domain", 0, 0, "hull [" + fmt(hull.lo) + ", " + fmt(hull.hi) + "] is not a nondegenerate interval");
    return report;
  }
  if (!(std::isfinite(osc.lo) && std::isfinite(osc.hi)) || !(osc.lo < osc.hi)) {
    fail("osc", 0, 0, "osc (" + fmt(osc.lo) + ", " + fmt(osc.hi) + ") is empty");
    return report;
  }

  for (int i = 0; i < s; ++i) {
    const auto& br = spec.branches[static_cast<std::size_t>(i)];
    const std::string name = "branch " + std::to_string(i + 1);
    if (br.has_pole_in(hull) || br.has_pole_in(osc)) {
      fail("domain", i + 1, 0, name + " has a pole on the hull or osc");
      report.contraction_factors.push_back(kInf);
      continue;
    }
    const double factor = std::max(br.derivative(hull.lo), br.derivative(hull.hi));
    report.contraction_factors.push_back(factor);
    if (!(br.derivative(hull.lo) > 0.0 && br.derivative(hull.hi) > 0.0)) {
      fail("orientation", i + 1, 0, name + " derivative not positive on hull");
    }
    if (!(factor < 1.0)) fail("contraction", i + 1, 0, name + " contraction factor " + fmt(factor) + " >= 1");
    if (br(hull.lo) < hull.lo - kTouchTol || br(hull.hi) > hull.hi + kTouchTol) {
      fail("invariance", i + 1, 0, name + " does not map the hull into itself");
    }
    if (br(osc.lo) < osc.lo - kTouchTol || br(osc.hi) > osc.hi + kTouchTol) {
      fail("osc", i + 1, 0, name + " does not map the open set into itself");
    }
  }
  if (!report.issues.empty()) return report;

  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      const auto& bi = spec.branches[static_cast<std::size_t>(i)];
      const auto& bj = spec.branches[static_cast<std::size_t>(j)];
      const double ilo = bi(osc.lo), ihi = bi(osc.hi);
      const double jlo = bj(osc.lo), jhi = bj(osc.hi);
      const bool disjoint = ihi <= jlo + kTouchTol || jhi <= ilo + kTouchTol;
      if (!disjoint) {
        fail("overlap", i + 1, j + 1,
             "images of branches " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap: (" +
                 fmt(ilo) + ", " + fmt(ihi) + ") and (" + fmt(jlo) + ", " + fmt(jhi) + ")");
      } else if (!(ihi <= jlo + kTouchTol)) {
        fail("order", i + 1, j + 1,
             "branch " + std::to_string(i + 1) + " image lies right of branch " + std::to_string(j + 1));
      }
    }
  }
  report.passed = report.issues.empty();
  return report;
}

Ifs::Ifs(std::vector<BranchMap> branches, Interval hull, Interval osc, std::vector<double> contraction)
    : alphabet_(static_cast<int>(branches.size())),
      branches_(std::move(branches)),
      hull_(hull),
      osc_(osc),
      contraction_(std::move(contraction)) {
  for (const auto& br : branches_) {
    max_abs_log_derivative_ = std::max(
        {max_abs_log_derivative_, std::fabs(br.log_derivative(hull_.lo)), std::fabs(br.log_derivative(hull_.hi))});
  }
}

Ifs Ifs::create(const IfsSpec& spec) {
  auto report = validate_ifs(spec);
  if (!report.passed) throw ValidationError("invalid IFS: " + report.summary());
  return Ifs(spec.branches, report.hull, report.osc, report.contraction_factors);
}

std::shared_ptr<const Ifs> Ifs::make_shared(const IfsSpec& spec) {
  return std::make_shared<const Ifs>(create(spec));
}

double Ifs::max_contraction() const noexcept {
  return *std::max_element(contraction_.begin(), contraction_.end());
}

bool Ifs::all_affine() const noexcept {
  return std::all_of(branches_.begin(), branches_.end(),
                     [](const BranchMap& b) { return b.kind() == BranchMap::Kind::affine; });
}

bool Ifs::tiles_hull(double tol) const noexcept {
  if (std::fabs(branches_.front()(hull_.lo) - hull_.lo) > tol) return false;
  if (std::fabs(branches_.back()(hull_.hi) - hull_.hi) > tol) return false;
  for (std::size_t i = 0; i + 1 < branches_.size(); ++i) {
    if (std::fabs(branches_[i](hull_.hi) - branches_[i + 1](hull_.lo)) > tol) return false;
  }
  return true;
}

Interval Ifs::attractor_bounds() const {
  return {fixed_point(*this, Word{1}), fixed_point(*this, Word{size()})};
}

Interval compose_image(const Ifs& ifs, std::span<const int> word, const Interval& x) {
  // Branches map the hull into itself, so images of subsets of the hull can
  // be clipped to it; this keeps rounded cylinder enclosures nested.
  const Interval& hull = ifs.hull();
  const bool clip = x.lo >= hull.lo && x.hi <= hull.hi;
  Interval out = x;
  for (std::size_t k = word.size(); k-- > 0;) {
    out = ifs.branch(word[k]).image(out);
    if (clip) out = {std::max(out.lo, hull.lo), std::min(out.hi, hull.hi)};
  }
  return out;
}

CylinderInterval cylinder_interval(const Ifs& ifs, const Word& word) {
  word.validate(ifs.alphabet());
  return {word, compose_image(ifs, word.symbols(), ifs.hull())};
}

CodingPoint coding_point(const Ifs& ifs, const Word& word) {
  const auto cyl = cylinder_interval(ifs, word);
  return {cyl.interval.midpoint(), 0.5 * cyl.diameter()};
}

DigitExpansion digits_of_point(const Ifs& ifs, double x, int n) {
  if (n < 1) throw ValidationError("digits_of_point needs n >= 1");
  const Interval& hull = ifs.hull();
  if (!hull.contains(x)) {
    throw GapPointError("point " + fmt(x) + " lies outside the hull", x < hull.lo ? -kInf : hull.hi,
                        x < hull.lo ? hull.lo : kInf);
  }
  std::vector<Word> frontier{Word{}};
  for (int level = 1; level <= n; ++level) {
    std::vector<Word> next;
    double left_flank = -kInf, right_flank = kInf;
    for (const auto& w : frontier) {
      for (int i = 1; i <= ifs.size(); ++i) {
        Word child = w.extended(i);
        const Interval iv = compose_image(ifs, child.symbols(), hull);
        if (iv.contains(x)) {
          next.push_back(std::move(child));
        } else if (iv.hi < x) {
          left_flank = std::max(left_flank, iv.hi);
        } else {
          right_flank = std::min(right_flank, iv.lo);
        }
      }
    }
    if (next.empty()) {
      throw GapPointError("point " + fmt(x) + " lies in a gap of the depth-" + std::to_string(level) + " cover",
                          left_flank, right_flank);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  DigitExpansion out;
  out.primary = frontier.front();
  if (frontier.size() > 1) {
    out.secondary = frontier.back();
    out.boundary = true;
  }
  return out;
}

double fixed_point(const Ifs& ifs, const Word& word) {
  if (word.empty()) throw ValidationError("fixed_point needs a nonempty word");
  word.validate(ifs.alphabet());
  const auto sym = word.symbols();
  bool affine = true;
  for (int c : sym) affine = affine && ifs.branch(c).kind() == BranchMap::Kind::affine;
  if (affine) {
    // phi_w(x) = R x + A, built from the outermost branch inward.
    double r = 1.0, a = 0.0;
    for (int c : sym) {
      const auto& br = ifs.branch(c);
      a += r * br.b();
      r *= br.a();
    }
    return a / (1.0 - r);
  }
  auto apply = [&](double x) {
    for (std::size_t k = sym.size(); k-- > 0;) x = ifs.branch(sym[k])(x);
    return x;
  };
  Interval iv = compose_image(ifs, sym, ifs.hull());
  double lo = iv.lo, hi = iv.hi;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (apply(mid) - mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(hi - lo <= 1e-14) && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(hi))) {
    throw NumericalError("fixed point bisection did not converge for word " + word.to_string());
  }
  return 0.5 * (lo + hi);
}

double log_derivative(const Ifs& ifs, std::span<const int> word, double x) {
  double sum = 0.0;
  for (std::size_t k = word.size(); k-- > 0;) {
    const auto& br = ifs.branch(word[k]);
    sum += br.log_derivative(x);
    x = br(x);
  }
  return sum;
}

double log_derivative_at(const Ifs& ifs, const Word& word) {
  return log_derivative(ifs, word.symbols(), fixed_point(ifs, word));
}

}  // namespace multifrac
