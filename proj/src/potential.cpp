#include "multifrac/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multifrac/errors.hpp"

namespace multifrac {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// First n terms of the Birkhoff sum along the periodic point w w w ...
double partial_sum_periodic(const Potential& f, const Word& w, std::size_t n) {
  const std::size_t d = w.size();
  if (const LocalTable* table = f.table()) {
    const auto m = static_cast<std::size_t>(table->depth());
    std::vector<int> window(m);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < m; ++j) window[j] = w[(k + j) % d];
      sum += table->value(window);
    }
    return sum + static_cast<double>(n) * f.shift();
  }
  // sigma^n of the periodic point is the periodic point of the rotated word.
  std::vector<int> rotated(d);
  for (std::size_t j = 0; j < d; ++j) rotated[j] = w[(n + j) % d];
  const double x = fixed_point(*f.ifs(), Word(std::move(rotated)));
  const double logd = log_derivative(*f.ifs(), w.symbols().subspan(0, n), x);
  return f.scale() * logd + static_cast<double>(n) * f.shift();
}

}  // namespace

LocalTable::LocalTable(Alphabet alphabet, int depth, std::vector<double> values)
    : alphabet_(alphabet), depth_(depth), values_(std::move(values)) {
  if (depth < 1) throw ValidationError("locally constant table depth must be >= 1");
  const std::size_t expected = ipow(alphabet.size(), static_cast<std::size_t>(depth));
  if (values_.size() != expected) {
    throw ValidationError("locally constant table of depth " + std::to_string(depth) + " needs " +
                          std::to_string(expected) + " entries, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("locally constant table contains a non-finite entry");
  }
  const auto s = static_cast<std::size_t>(alphabet.size());
  prefix_min_.resize(static_cast<std::size_t>(depth) + 1);
  prefix_max_.resize(static_cast<std::size_t>(depth) + 1);
  prefix_min_.back() = values_;
  prefix_max_.back() = values_;
  for (int len = depth - 1; len >= 0; --len) {
    const auto& cmin = prefix_min_[static_cast<std::size_t>(len) + 1];
    const auto& cmax = prefix_max_[static_cast<std::size_t>(len) + 1];
    const std::size_t count = cmin.size() / s;
    auto& pmin = prefix_min_[static_cast<std::size_t>(len)];
    auto& pmax = prefix_max_[static_cast<std::size_t>(len)];
    pmin.assign(count, std::numeric_limits<double>::infinity());
    pmax.assign(count, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < cmin.size(); ++i) {
      pmin[i / s] = std::min(pmin[i / s], cmin[i]);
      pmax[i / s] = std::max(pmax[i / s], cmax[i]);
    }
  }
}

double LocalTable::value(std::span<const int> word) const {
  return values_[word_index(word.subspan(0, static_cast<std::size_t>(depth_)), alphabet_.size())];
}

LocalTable LocalTable::refined(int depth) const {
  if (depth < depth_) throw ValidationError("cannot refine a table to a smaller depth");
  const std::size_t extra = ipow(alphabet_.size(), static_cast<std::size_t>(depth - depth_));
  std::vector<double> out(values_.size() * extra);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i / extra];
  return LocalTable(alphabet_, depth, std::move(out));
}

LocalTable LocalTable::shifted(double c) const {
  std::vector<double> out = values_;
  for (double& v : out) v += c;
  return LocalTable(alphabet_, depth_, std::move(out));
}

Potential Potential::locally_constant(int alphabet_size, int depth, std::vector<double> table) {
  Alphabet alphabet(alphabet_size);
  Potential p(Kind::locally_constant, alphabet);
  p.table_ = std::make_shared<const LocalTable>(alphabet, depth, std::move(table));
  return p;
}

Potential Potential::symbol_log_weights(std::vector<double> values) {
  Alphabet alphabet(static_cast<int>(values.size()));
  Potential p(Kind::symbol_log_weights, alphabet);
  p.table_ = std::make_shared<const LocalTable>(alphabet, 1, std::move(values));
  return p;
}

Potential Potential::geometric(std::shared_ptr<const Ifs> ifs, double scale) {
  if (!ifs) throw ValidationError("geometric potential needs a validated IFS");
  if (!std::isfinite(scale)) throw ValidationError("geometric potential scale must be finite");
  Potential p(Kind::geometric, ifs->alphabet());
  p.ifs_ = std::move(ifs);
  p.scale_ = scale;
  return p;
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  p.shift_ += c;
  return p;
}

Potential Potential::with_hoelder_bound(HoelderBound bound) const {
  if (!(bound.constant > 0.0) || !(bound.theta > 0.0 && bound.theta < 1.0)) {
    throw ValidationError("hoelder bound needs C > 0 and 0 < theta < 1");
  }
  Potential p = *this;
  p.hoelder_ = bound;
  return p;
}

std::optional<LocalTable> Potential::exact_table() const {
  if (table_) return table_->shifted(shift_);
  if (ifs_->all_affine()) {
    std::vector<double> values;
    for (const auto& br : ifs_->branches()) values.push_back(scale_ * std::log(br.a()) + shift_);
    return LocalTable(alphabet_, 1, std::move(values));
  }
  return std::nullopt;
}

int Potential::locality() const noexcept {
  if (table_) return table_->depth();
  return ifs_->all_affine() ? 1 : 0;
}

bool Potential::strictly_negative() const {
  if (table_) {
    const auto& v = table_->values();
    return *std::max_element(v.begin(), v.end()) + shift_ < 0.0;
  }
  // log phi' < log(contraction) < 0 on the hull.
  if (scale_ <= 0.0) return false;
  return scale_ * std::log(ifs_->max_contraction()) + shift_ < 0.0;
}

double birkhoff_sum_periodic(const Potential& f, const Word& gamma) {
  if (gamma.empty()) throw ValidationError("birkhoff_sum_periodic needs a nonempty word");
  gamma.validate(f.alphabet());
  if (f.kind() == Potential::Kind::geometric) {
    return f.scale() * log_derivative_at(*f.ifs(), gamma) + static_cast<double>(gamma.size()) * f.shift();
  }
  return partial_sum_periodic(f, gamma, gamma.size());
}

SumWalker::SumWalker(const Potential& f, const Word& tail) : f_(&f), table_(f.table()) {
  tail.validate(f.alphabet());
  reversed_.assign(tail.symbols().rbegin(), tail.symbols().rend());
  if (table_) {
    double mag = 0.0;
    for (double v : table_->values()) mag = std::max(mag, std::fabs(v));
    pad_per_term_ = 4.0 * kEps * (mag + std::fabs(f.shift()));
    states_.push_back({0.0, 0.0, 0.0, 0.0});
  } else {
    const Interval iv = compose_image(*f.ifs(), tail.symbols(), f.ifs()->hull());
    pad_per_term_ = 8.0 * kEps * (f.ifs()->max_abs_log_derivative() + 1.0) * std::fabs(f.scale()) +
                    4.0 * kEps * std::fabs(f.shift());
    states_.push_back({iv.lo, iv.hi, 0.0, 0.0});
  }
}

void SumWalker::push_front(int symbol) {
  const State& cur = states_.back();
  if (table_) {
    const int m = table_->depth();
    const int s = table_->alphabet().size();
    const int known = std::min<int>(m, 1 + static_cast<int>(reversed_.size()));
    std::size_t idx = static_cast<std::size_t>(symbol - 1);
    for (int j = 1; j < known; ++j) {
      idx = idx * static_cast<std::size_t>(s) + static_cast<std::size_t>(reversed_[reversed_.size() - static_cast<std::size_t>(j)] - 1);
    }
    double lo, hi;
    if (known == m) {
      lo = hi = (*table_)[idx];
    } else {
      lo = table_->prefix_min(known, idx);
      hi = table_->prefix_max(known, idx);
    }
    states_.push_back({cur.lo + lo, cur.hi + hi, 0.0, 0.0});
  } else {
    const auto& br = f_->ifs()->branch(symbol);
    states_.push_back({br(cur.lo), br(cur.hi), cur.log_lo + br.log_derivative(cur.lo),
                       cur.log_hi + br.log_derivative(cur.hi)});
  }
  reversed_.push_back(symbol);
}

void SumWalker::pop_front() {
  states_.pop_back();
  reversed_.pop_back();
}

double SumWalker::lower() const noexcept {
  const State& st = states_.back();
  const double n = static_cast<double>(length());
  const double pad = n * pad_per_term_;
  if (table_) return st.lo + n * f_->shift() - pad;
  const double a = f_->scale() * st.log_lo, b = f_->scale() * st.log_hi;
  return std::min(a, b) + n * f_->shift() - pad;
}

double SumWalker::upper() const noexcept {
  const State& st = states_.back();
  const double n = static_cast<double>(length());
  const double pad = n * pad_per_term_;
  if (table_) return st.hi + n * f_->shift() + pad;
  const double a = f_->scale() * st.log_lo, b = f_->scale() * st.log_hi;
  return std::max(a, b) + n * f_->shift() + pad;
}

CylinderBounds cylinder_bounds(const Potential& f, const Word& gamma, int probe_depth,
                               const EnumerationBudget& budget) {
  if (gamma.empty()) throw ValidationError("cylinder_bounds needs a nonempty word");
  gamma.validate(f.alphabet());
  const int n = static_cast<int>(gamma.size());
  if (probe_depth < n) throw ValidationError("probe_depth must be at least |gamma|");
  const int tail_len = probe_depth - n;
  budget.check(f.alphabet(), tail_len);

  CylinderBounds out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  // Hoelder envelope: union over tails of center -/+ variation.
  double hoelder_lo = std::numeric_limits<double>::infinity();
  double hoelder_hi = -std::numeric_limits<double>::infinity();
  const auto& hb = f.hoelder_bound();

  auto visit_tail = [&](std::span<const int> tail_symbols) {
    const Word tail(std::vector<int>(tail_symbols.begin(), tail_symbols.end()));
    SumWalker walker(f, tail);
    for (int k = n - 1; k >= 0; --k) walker.push_front(gamma[static_cast<std::size_t>(k)]);
    out.lower = std::min(out.lower, walker.lower());
    out.upper = std::max(out.upper, walker.upper());
    if (hb) {
      const Word w = concat(gamma, tail);
      double var = 0.0;
      for (int j = 0; j < n; ++j) var += hb->constant * std::pow(hb->theta, probe_depth - j);
      const double center = partial_sum_periodic(f, w, static_cast<std::size_t>(n));
      hoelder_lo = std::min(hoelder_lo, center - var);
      hoelder_hi = std::max(hoelder_hi, center + var);
    }
  };
  if (tail_len == 0) {
    visit_tail({});
  } else {
    for_each_word(f.alphabet(), tail_len, visit_tail, budget);
  }
  if (hb) {
    const double lo = std::max(out.lower, hoelder_lo);
    const double hi = std::min(out.upper, hoelder_hi);
    if (lo <= hi && (lo > out.lower || hi < out.upper)) {
      out.lower = lo;
      out.upper = hi;
      out.source = CylinderBounds::Source::hoelder;
    }
  }
  return out;
}

}  // namespace multifrac
