#include "multifrac/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "multifrac/errors.hpp"

namespace multifrac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming log-sum-exp.
class LogSumExp {
 public:
  void add(double v) {
    if (v == -kInf) return;
    if (v > max_) {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    } else {
      sum_ += std::exp(v - max_);
    }
  }
  double value() const { return max_ == -kInf ? -kInf : max_ + std::log(sum_); }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

double combine_lower(double coeff, double lo, double hi) { return coeff >= 0.0 ? coeff * lo : coeff * hi; }
double combine_upper(double coeff, double lo, double hi) { return coeff >= 0.0 ? coeff * hi : coeff * lo; }

LocalTable combine(double t, const LocalTable& a, double beta, const LocalTable& b) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = t * a[i] + beta * b[i];
  return LocalTable(a.alphabet(), a.depth(), std::move(v));
}

LocalTable combine_bound(double t, const TableBracket& a, double beta, const TableBracket& b, bool upper) {
  std::vector<double> v(a.mid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (upper) {
      v[i] = combine_upper(t, a.lower[i], a.upper[i]) + combine_upper(beta, b.lower[i], b.upper[i]);
    } else {
      v[i] = combine_lower(t, a.lower[i], a.upper[i]) + combine_lower(beta, b.lower[i], b.upper[i]);
    }
  }
  return LocalTable(a.mid.alphabet(), a.mid.depth(), std::move(v));
}

void check_alphabets(const CombinedPotential& f) {
  if (!(f.phi.alphabet() == f.psi.alphabet())) {
    throw ValidationError("phi and psi live on different alphabets");
  }
  if (!std::isfinite(f.t) || !std::isfinite(f.beta)) throw ValidationError("non-finite pressure coefficients");
}

}  // namespace

int common_depth(const Potential& phi, const Potential& psi, int approximation_depth) {
  int m = std::max({1, phi.locality(), psi.locality()});
  if (phi.locality() == 0 || psi.locality() == 0) m = std::max(m, approximation_depth);
  return m;
}

TableBracket combine_tables(double t, const TableBracket& a, double beta, const TableBracket& b) {
  if (a.mid.depth() != b.mid.depth()) throw ValidationError("combined tables must share a depth");
  LocalTable mid = combine(t, a.mid, beta, b.mid);
  const bool exact = (a.exact || t == 0.0) && (b.exact || beta == 0.0);
  if (exact) return {mid, mid, mid, true};
  return {combine_bound(t, a, beta, b, false), combine_bound(t, a, beta, b, true), std::move(mid), false};
}

TableBracket potential_tables(const Potential& f, int depth) {
  if (auto exact = f.exact_table()) {
    LocalTable t = exact->depth() < depth ? exact->refined(depth) : *exact;
    return {t, t, t, true};
  }
  const Alphabet& alphabet = f.alphabet();
  const std::size_t count = ipow(alphabet.size(), static_cast<std::size_t>(depth));
  std::vector<double> lo(count), hi(count), mid(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const Word u = word_from_index(idx, static_cast<std::size_t>(depth), alphabet.size());
    SumWalker walker(f, u.drop_front(1));
    walker.push_front(u.front());
    lo[idx] = walker.lower();
    hi[idx] = walker.upper();
    mid[idx] = 0.5 * (lo[idx] + hi[idx]);
  }
  return {LocalTable(alphabet, depth, std::move(lo)), LocalTable(alphabet, depth, std::move(hi)),
          LocalTable(alphabet, depth, std::move(mid)), false};
}

TableBracket table_bracket(const CombinedPotential& f, const PressureOptions& options) {
  check_alphabets(f);
  const int m = common_depth(f.phi, f.psi, options.approximation_depth);
  options.budget.check(f.phi.alphabet(), m);
  return combine_tables(f.t, potential_tables(f.phi, m), f.beta, potential_tables(f.psi, m));
}

PerronData perron_data(const LocalTable& table, const PressureOptions& options, bool with_left) {
  const auto s = static_cast<std::size_t>(table.alphabet().size());
  const std::size_t n = table.size();
  const std::size_t tail_count = n / s;  // s^(m-1)
  const auto& values = table.values();
  const double shift = *std::max_element(values.begin(), values.end());
  std::vector<double> w(n);
  for (std::size_t u = 0; u < n; ++u) w[u] = std::exp(values[u] - shift);

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t base = (u % tail_count) * s;
      double acc = 0.0;
      for (std::size_t j = 0; j < s; ++j) acc += x[base + j];
      y[u] = w[u] * acc;
    }
  };
  auto apply_transpose = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t tail = v / s;
      double acc = 0.0;
      for (std::size_t i = 0; i < s; ++i) {
        const std::size_t u = i * tail_count + tail;
        acc += x[u] * w[u];
      }
      y[v] = acc;
    }
  };

  const double vec_tol = std::max(1e-12, 10.0 * options.eigen_tolerance);
  auto iterate = [&](auto&& op, std::vector<double>& x, int& iterations) {
    x.assign(n, 1.0 / static_cast<double>(n));
    std::vector<double> y(n);
    double rayleigh = 0.0;
    int streak = 0;
    for (iterations = 1; iterations <= options.max_iterations; ++iterations) {
      op(x, y);
      double num = 0.0, den = 0.0, total = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        num += x[u] * y[u];
        den += x[u] * x[u];
        total += y[u];
      }
      const double next = num / den;
      double change = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        const double v = y[u] / total;
        change = std::max(change, std::fabs(v - x[u]) / std::max(v, std::numeric_limits<double>::min()));
        x[u] = v;
      }
      const bool small = iterations > 1 && std::fabs(next - rayleigh) <= options.eigen_tolerance * std::fabs(next);
      streak = small ? streak + 1 : 0;
      rayleigh = next;
      if (streak >= 3 && change <= vec_tol) return rayleigh;
    }
    throw NumericalError("power iteration did not converge within " + std::to_string(options.max_iterations) +
                         " iterations");
  };

  PerronData out{};
  const double rayleigh = iterate(apply, out.right, out.iterations);
  std::vector<double> y(n);
  apply(out.right, y);
  double cw_lo = kInf, cw_hi = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const double r = y[u] / out.right[u];
    cw_lo = std::min(cw_lo, r);
    cw_hi = std::max(cw_hi, r);
  }
  out.log_radius = std::log(rayleigh) + shift;
  out.log_lower = std::min(std::log(cw_lo) + shift, out.log_radius);
  out.log_upper = std::max(std::log(cw_hi) + shift, out.log_radius);
  if (with_left) {
    int left_iterations = 0;
    iterate(apply_transpose, out.left, left_iterations);
    out.iterations = std::max(out.iterations, left_iterations);
  }
  return out;
}

PressureEstimate pressure_from_tables(const TableBracket& tb, const PressureOptions& options, bool bounds) {
  const PerronData mid = perron_data(tb.mid, options, false);
  PressureEstimate out{mid.log_radius, mid.log_lower, mid.log_upper, tb.mid.depth(),
                       PressureEstimate::Method::spectral};
  if (bounds && !tb.exact) {
    out.lower = std::min(perron_data(tb.lower, options, false).log_lower, out.value);
    out.upper = std::max(perron_data(tb.upper, options, false).log_upper, out.value);
  }
  return out;
}

PressureEstimate pressure_spectral(const CombinedPotential& f, const PressureOptions& options) {
  return pressure_from_tables(table_bracket(f, options), options);
}

PressureEstimate pressure_periodic(const CombinedPotential& f, int n, const PressureOptions& options) {
  check_alphabets(f);
  if (n < 1) throw ValidationError("pressure_periodic needs n >= 1");
  const Alphabet& alphabet = f.phi.alphabet();
  const bool use_phi = f.t != 0.0;
  const bool use_psi = f.beta != 0.0;

  // Periodic-orbit value.
  LogSumExp periodic;
  for_each_word(
      alphabet, n,
      [&](std::span<const int> w) {
        const Word word(std::vector<int>(w.begin(), w.end()));
        double v = 0.0;
        if (use_phi) v += f.t * birkhoff_sum_periodic(f.phi, word);
        if (use_psi) v += f.beta * birkhoff_sum_periodic(f.psi, word);
        periodic.add(v);
      },
      options.budget);
  const double value = periodic.value() / n;

  // Tail length: table potentials need the m - 1 symbols that finish their
  // last window; geometric ones benefit from short tail cylinders.
  int tail = 0;
  for (const Potential* p : {&f.phi, &f.psi}) {
    if ((p == &f.phi && !use_phi) || (p == &f.psi && !use_psi)) continue;
    if (p->table()) {
      tail = std::max(tail, p->table()->depth() - 1);
    } else if (!p->ifs()->all_affine()) {
      tail = std::max(tail, options.tail_depth < 0 ? n : options.tail_depth);
    }
  }
  options.budget.check(alphabet, n + tail);

  std::vector<double> best_lower(static_cast<std::size_t>(n) + 1, kInf);
  std::vector<double> best_upper(static_cast<std::size_t>(n) + 1, -kInf);
  const int s = alphabet.size();

  auto visit_tail = [&](std::span<const int> tail_symbols) {
    const Word tail_word(std::vector<int>(tail_symbols.begin(), tail_symbols.end()));
    std::optional<SumWalker> wphi, wpsi;
    if (use_phi) wphi.emplace(f.phi, tail_word);
    if (use_psi) wpsi.emplace(f.psi, tail_word);
    std::vector<LogSumExp> lo(static_cast<std::size_t>(n) + 1), hi(static_cast<std::size_t>(n) + 1);
    lo[0].add(0.0);
    hi[0].add(0.0);
    // Depth-first over prefixes, prepending symbols.
    std::vector<int> next_symbol(static_cast<std::size_t>(n) + 1, 1);
    int level = 0;
    while (level >= 0) {
      if (level == n || next_symbol[static_cast<std::size_t>(level)] > s) {
        next_symbol[static_cast<std::size_t>(level)] = 1;
        if (level > 0) {
          if (wphi) wphi->pop_front();
          if (wpsi) wpsi->pop_front();
        }
        --level;
        continue;
      }
      const int c = next_symbol[static_cast<std::size_t>(level)]++;
      if (wphi) wphi->push_front(c);
      if (wpsi) wpsi->push_front(c);
      ++level;
      double l = 0.0, h = 0.0;
      if (wphi) {
        l += combine_lower(f.t, wphi->lower(), wphi->upper());
        h += combine_upper(f.t, wphi->lower(), wphi->upper());
      }
      if (wpsi) {
        l += combine_lower(f.beta, wpsi->lower(), wpsi->upper());
        h += combine_upper(f.beta, wpsi->lower(), wpsi->upper());
      }
      lo[static_cast<std::size_t>(level)].add(l);
      hi[static_cast<std::size_t>(level)].add(h);
    }
    for (int d = 1; d <= n; ++d) {
      const int b = d / 2;
      const int a = d - b;
      const auto du = static_cast<std::size_t>(d), bu = static_cast<std::size_t>(b);
      best_lower[du] = std::min(best_lower[du], (lo[du].value() - hi[bu].value()) / a);
      best_upper[du] = std::max(best_upper[du], (hi[du].value() - lo[bu].value()) / a);
    }
  };
  if (tail == 0) {
    visit_tail({});
  } else {
    for_each_word(alphabet, tail, visit_tail, options.budget);
  }

  double lower = -kInf, upper = kInf;
  for (int d = 1; d <= n; ++d) {
    lower = std::max(lower, best_lower[static_cast<std::size_t>(d)]);
    upper = std::min(upper, best_upper[static_cast<std::size_t>(d)]);
  }
  if (lower > upper) {
    // Only reachable through rounding in degenerate (exactly constant) cases.
    const double m = 0.5 * (lower + upper);
    lower = upper = m;
  }
  return {std::clamp(value, lower, upper), lower, upper, n, PressureEstimate::Method::periodic};
}

MarkovMeasure MarkovMeasure::from_table(const LocalTable& table, const PressureOptions& options, bool approximate) {
  MarkovMeasure mu(table.alphabet(), table.depth());
  const PerronData pd = perron_data(table, options, true);
  mu.pressure_shift_ = pd.log_radius;
  mu.approximate_ = approximate;
  mu.right_ = pd.right;
  mu.left_ = pd.left;

  const auto s = static_cast<std::size_t>(table.alphabet().size());
  const std::size_t n = table.size();
  const std::size_t tail_count = n / s;

  mu.transitions_.assign(n * s, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t base = (u % tail_count) * s;
    double total = 0.0;
    for (std::size_t j = 0; j < s; ++j) total += pd.right[base + j];
    for (std::size_t j = 0; j < s; ++j) mu.transitions_[u * s + j] = pd.right[base + j] / total;
  }

  mu.stationary_.resize(n);
  double total = 0.0;
  for (std::size_t u = 0; u < n; ++u) total += pd.left[u] * pd.right[u];
  for (std::size_t u = 0; u < n; ++u) mu.stationary_[u] = pd.left[u] * pd.right[u] / total;

  const auto m = static_cast<std::size_t>(table.depth());
  mu.marginals_.resize(m + 1);
  mu.marginals_[m] = mu.stationary_;
  for (std::size_t len = m; len-- > 0;) {
    const auto& child = mu.marginals_[len + 1];
    auto& parent = mu.marginals_[len];
    parent.assign(child.size() / s, 0.0);
    for (std::size_t i = 0; i < child.size(); ++i) parent[i / s] += child[i];
  }
  return mu;
}

MarkovMeasure MarkovMeasure::from_potential(const Potential& psi, const PressureOptions& options) {
  if (auto exact = psi.exact_table()) return from_table(*exact, options, false);
  const TableBracket tb = potential_tables(psi, options.approximation_depth);
  return from_table(tb.mid, options, true);
}

double MarkovMeasure::normalization_constant() const noexcept { return std::exp(pressure_shift_); }

double MarkovMeasure::mass(std::span<const int> word) const {
  const auto n = word.size();
  const auto m = static_cast<std::size_t>(depth_);
  const int s = alphabet_.size();
  if (n <= m) return marginals_[n][word_index(word, s)];
  std::size_t state = word_index(word.subspan(0, m), s);
  const std::size_t tail_count = stationary_.size() / static_cast<std::size_t>(s);
  double out = stationary_[state];
  for (std::size_t k = m; k < n; ++k) {
    out *= transition(state, word[k]);
    state = (state % tail_count) * static_cast<std::size_t>(s) + static_cast<std::size_t>(word[k] - 1);
  }
  return out;
}

double gibbs_cylinder_measure(const MarkovMeasure& mu, const Word& gamma) {
  gamma.validate(mu.alphabet());
  return mu.mass(gamma);
}

GibbsProbe gibbs_constant_probe(const MarkovMeasure& mu, const Potential& psi, std::span<const int> depths,
                                const EnumerationBudget& budget) {
  GibbsProbe out{{depths.begin(), depths.end()}, {}, 0.0};
  for (int n : depths) {
    double worst = 0.0;
    for_each_word(
        mu.alphabet(), n,
        [&](std::span<const int> w) {
          const Word word(std::vector<int>(w.begin(), w.end()));
          worst = std::max(worst, std::fabs(std::log(mu.mass(w)) - birkhoff_sum_periodic(psi, word)));
        },
        budget);
    out.maxima.push_back(worst);
    out.bound = std::max(out.bound, worst);
  }
  return out;
}

Potential normalize_potential(const Potential& psi, const PressureOptions& options) {
  const PressureEstimate p = pressure_spectral({0.0, 1.0, psi, psi}, options);
  return psi.shifted(-p.value);
}

EquilibriumIntegrals equilibrium_integrals(double t, double beta, const Potential& phi, const Potential& psi,
                                           int depth, const PressureOptions& options) {
  if (!(phi.alphabet() == psi.alphabet())) throw ValidationError("phi and psi live on different alphabets");
  const int m = std::max({depth, phi.locality(), psi.locality()});
  const TableBracket a = potential_tables(phi, m);
  const TableBracket b = potential_tables(psi, m);
  const MarkovMeasure mu = MarkovMeasure::from_table(combine(t, a.mid, beta, b.mid), options);
  EquilibriumIntegrals out{0.0, 0.0};
  const auto& pi = mu.stationary();
  for (std::size_t u = 0; u < pi.size(); ++u) {
    out.phi += pi[u] * a.mid[u];
    out.psi += pi[u] * b.mid[u];
  }
  return out;
}

}  // namespace multifrac
