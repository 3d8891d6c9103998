// Prints one line per acceptance criterion and exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "multifrac/cli/app.hpp"
#include "multifrac/conjugacy.hpp"
#include "multifrac/distribution.hpp"
#include "multifrac/multifractal.hpp"
#include "multifrac/thermo.hpp"

using namespace multifrac;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::shared_ptr<const Ifs> affine2(double r1, double o1, double r2, double o2) {
  return Ifs::make_shared({{BranchMap::affine(r1, o1), BranchMap::affine(r2, o2)}, Interval{0.0, 1.0}, {}});
}

std::shared_ptr<const Ifs> dyadic() { return affine2(0.5, 0.0, 0.5, 0.5); }
std::shared_ptr<const Ifs> thirds() { return affine2(1.0 / 3.0, 0.0, 2.0 / 3.0, 1.0 / 3.0); }
std::shared_ptr<const Ifs> moebius() {
  return Ifs::make_shared(
      {{BranchMap::moebius(1.0, 0.0, 1.0, 2.0), BranchMap::moebius(0.0, 2.0, -1.0, 3.0)}, Interval{0.0, 1.0}, {}});
}

Potential bernoulli() { return Potential::symbol_log_weights({std::log(0.3), std::log(0.7)}); }

MultifractalProblem binomial() { return MultifractalProblem::create(Potential::geometric(dyadic()), bernoulli()); }

double log2_t(double p, double q, double beta) { return std::log2(std::pow(p, beta) + std::pow(q, beta)); }

// log of a 2x2 stochastic matrix with rows uniform in [0.35, 0.65], mt19937_64(7).
Potential seeded_depth2() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> row(0.35, 0.65);
  std::vector<double> table;
  for (int a = 0; a < 2; ++a) {
    const double p = row(rng);
    table.push_back(std::log(p));
    table.push_back(std::log(1.0 - p));
  }
  return Potential::locally_constant(2, 2, table);
}

Outcome criterion1() {
  const auto pb = binomial();
  double worst = 0.0;
  for (double beta : BetaGrid{-10.0, 10.0, 0.1}.values())
    worst = std::max(worst, std::fabs(solve_t(pb, beta).t - log2_t(0.3, 0.7, beta)));
  return {worst <= 1e-9, "max |t - log2(0.3^b + 0.7^b)| = " + fmt("%.3g", worst)};
}

Outcome criterion2() {
  const auto pb = binomial();
  const double t0 = solve_t(pb, 0.0).t;
  const double t1 = solve_t(pb, 1.0).t;
  const PressureCurve curve = pressure_curve(pb, BetaGrid{-2.0, 2.0, 0.5}.values());
  const SpectrumCurve sp = legendre_spectrum(curve);
  double a1 = NAN, f1 = NAN;
  for (const auto& s : sp.samples) {
    if (s.beta == 1.0) {
      a1 = s.alpha;
      f1 = s.f;
    }
  }
  const bool ok = std::fabs(t0 - 1.0) <= 1e-9 && std::fabs(t1) <= 1e-9 && std::fabs(f1 - a1) <= 1e-6 &&
                  std::fabs(a1 - 0.881291) <= 1e-6;
  return {ok, "t(0) = " + fmt("%.12f", t0) + ", t(1) = " + fmt("%.3g", t1) + ", alpha(1) = " + fmt("%.9f", a1) +
                  ", f(alpha(1)) = " + fmt("%.9f", f1)};
}

Outcome criterion3() {
  const SpectrumRange r = spectrum_range(binomial(), 1, 20.0);
  const bool ok = std::fabs(r.cycle_minus - 0.514573) <= 1e-6 && std::fabs(r.cycle_plus - 1.736966) <= 1e-6 &&
                  std::fabs(r.asymptotic_minus - r.cycle_minus) <= 5e-3 &&
                  std::fabs(r.asymptotic_plus - r.cycle_plus) <= 5e-3;
  return {ok, "cycle (" + fmt("%.7f", r.cycle_minus) + ", " + fmt("%.7f", r.cycle_plus) + "), asymptotic (" +
                  fmt("%.7f", r.asymptotic_minus) + ", " + fmt("%.7f", r.asymptotic_plus) + ")"};
}

Outcome criterion4() {
  const auto cantor = affine2(1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0);
  const Potential phi = Potential::geometric(cantor);
  const double t0 = solve_t(MultifractalProblem::create(phi, Potential::symbol_log_weights({-1.0, -1.0})), 0.0).t;
  const auto pb = MultifractalProblem::create(phi, Potential::geometric(cantor, t0));
  const double t = solve_t(pb, 0.0).t;
  const double expected = std::log(2.0) / std::log(3.0);
  const SpectrumClass cls = classify_spectrum(spectrum_range(pb, 4, 20.0), t);
  return {std::fabs(t - expected) <= 1e-9 && cls.degenerate && cls.apex_consistent,
          "t(0) = " + fmt("%.12f", t) + (cls.degenerate ? ", degenerate spectrum" : ", spectrum not degenerate")};
}

Outcome criterion5() {
  const std::vector<double> q = {-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
  double binom = 0.0;
  for (const auto& s : coarse_spectrum(MarkovMeasure::from_potential(bernoulli()), *dyadic(), 10, q))
    binom = std::max(binom, std::fabs(s.T - log2_t(0.3, 0.7, s.q)));

  const Potential psi = seeded_depth2();
  const auto mu = MarkovMeasure::from_potential(psi);
  const auto pb = MultifractalProblem::create(Potential::geometric(dyadic()), psi);
  std::vector<double> t;
  for (double x : q) t.push_back(solve_t(pb, x).t);
  auto deviation = [&](int n) {
    double worst = 0.0;
    const auto cs = coarse_spectrum(mu, *dyadic(), n, q);
    for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::fabs(cs[i].T - t[i]));
    return worst;
  };
  const double d12 = deviation(12), d16 = deviation(16);
  return {binom <= 1e-9 && d12 <= 0.02 && d16 <= 0.01 && d16 < d12,
          "binomial n=10 " + fmt("%.3g", binom) + ", depth-2 n=12 " + fmt("%.4f", d12) + ", n=16 " + fmt("%.4f", d16)};
}

Outcome criterion6() {
  const Potential psi = normalize_potential(seeded_depth2());
  const auto mu = MarkovMeasure::from_potential(psi);
  const std::vector<int> depths = {2, 4, 6, 8, 10};
  const GibbsProbe probe = gibbs_constant_probe(mu, psi, depths);
  const double ref = probe.maxima[1];
  bool ok = true;
  std::string list;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    ok = ok && probe.maxima[i] <= 1.1 * ref + 1e-12;
    list += (i ? " " : "") + fmt("%.4f", probe.maxima[i]);
  }
  return {ok, "maxima at depths 2..10: " + list};
}

Outcome criterion7() {
  const auto mu = MarkovMeasure::from_potential(bernoulli());
  const auto st = staircase(mu, *dyadic(), 2);
  bool exact = st.size() == 5;
  const double fs_[] = {0.09, 0.3, 0.51};
  for (std::size_t i = 0; exact && i < 3; ++i) {
    exact = st[i + 1].x == 0.25 * static_cast<double>(i + 1) && std::fabs(st[i + 1].F - fs_[i]) <= 1e-15 &&
            st[i + 1].error == 0.0;
  }
  const auto deep = staircase(mu, *dyadic(), 14);
  bool mono = deep.size() == 16385;
  for (std::size_t i = 1; mono && i < deep.size(); ++i) mono = deep[i].F >= deep[i - 1].F && deep[i].x >= deep[i - 1].x;
  return {exact && mono, std::string(exact ? "n=2 values match" : "n=2 values differ") +
                             (mono ? ", n=14 monotone" : ", n=14 not monotone") + " (" +
                             std::to_string(deep.size()) + " samples)"};
}

Outcome criterion8() {
  const auto mu = MarkovMeasure::from_potential(bernoulli());
  HoelderOptions opts;
  opts.K = 20;
  opts.rho = 0.5;
  const auto h = pointwise_hoelder(mu, *dyadic(), 0.0, opts);
  const bool end_ok = std::fabs(h.liminf_est - 1.736966) <= 0.05 && std::fabs(h.limsup_est - 1.736966) <= 0.05;
  HoelderOptions block_opts;
  block_opts.K = 24;
  const double x = coding_point(*dyadic(), block_coding_word(60)).point;
  const auto b = pointwise_hoelder(mu, *dyadic(), x, block_opts);
  const double gap = b.limsup_est - b.liminf_est;
  return {end_ok && gap >= 0.1, "x=0: " + fmt("%.6f", h.liminf_est) + " / " + fmt("%.6f", h.limsup_est) +
                                    ", block point gap " + fmt("%.3f", gap)};
}

Outcome criterion9() {
  const auto pair = ConjugacyPair::create(dyadic(), thirds());
  bool values = true;
  const double xs[] = {0.5, 0.25, 0.75}, ys[] = {1.0 / 3.0, 1.0 / 9.0, 5.0 / 9.0};
  for (int i = 0; i < 3; ++i) {
    const ThetaValue v = theta(pair, xs[i], 16);
    values = values && std::fabs(v.value - ys[i]) <= v.error;
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool dist = true;
  std::vector<double> sample;
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    sample.push_back(x);
    const auto d = theta_as_distribution(pair, x, 16);
    dist = dist && d.residual <= d.bound;
  }
  const FunctionalResidual fr = functional_equation_residual(pair, sample, 16);
  const auto cs = conjugacy_spectrum(pair, BetaGrid{-10.0, 10.0, 0.1}.values());
  double worst = 0.0;
  for (std::size_t i = 0; i < cs.curve.beta.size(); ++i)
    worst = std::max(worst, std::fabs(cs.curve.t[i] - log2_t(1.0 / 3.0, 2.0 / 3.0, cs.curve.beta[i])));
  return {values && dist && fr.max_excess <= 0.0 && worst <= 1e-9,
          std::string(values ? "theta values ok" : "theta values off") +
              (dist ? ", distribution identity ok" : ", distribution identity off") + ", functional residual " +
              fmt("%.3g", fr.max_residual) + ", spectrum error " + fmt("%.3g", worst)};
}

Outcome criterion10() {
  const Potential phi = Potential::geometric(moebius());
  const CombinedPotential f{1.0, 0.0, phi, phi};
  std::vector<PressureEstimate> p;
  for (int n : {6, 8, 10}) p.push_back(pressure_periodic(f, n));
  bool nest = true;
  for (std::size_t i = 1; i < p.size(); ++i)
    nest = nest && p[i].lower >= p[i - 1].lower && p[i].upper <= p[i - 1].upper;
  double lo = -INFINITY, hi = INFINITY;
  for (int d : {6, 8, 10}) {
    PressureOptions o;
    o.approximation_depth = d;
    const TSolution s = solve_t(MultifractalProblem::create(phi, phi, o), 0.0);
    lo = std::max(lo, s.lower);
    hi = std::min(hi, s.upper);
  }
  return {p.back().width() <= 0.01 && nest && lo <= hi,
          "width at n=10 " + fmt("%.2e", p.back().width()) + (nest ? ", nested" : ", not nested") +
              ", common t(0) enclosure [" + fmt("%.9f", lo) + ", " + fmt("%.9f", hi) + "]"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every cell of every data row (after the header, before the # block) must
// parse completely as a finite number.
bool all_cells_finite(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0' || !std::isfinite(v)) return false;
    }
  }
  return true;
}

Outcome criterion11() {
  const fs::path root = fs::temp_directory_path() / "multifrac_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string config = R"({
    "ifs": {"branches": [{"type": "affine", "ratio": 0.5, "offset": 0},
                         {"type": "affine", "ratio": 0.5, "offset": 0.5}], "hull": [0, 1]},
    "ifs_g": {"branches": [{"type": "affine", "ratio": 0.3333333333333333, "offset": 0},
                           {"type": "affine", "ratio": 0.6666666666666666, "offset": 0.3333333333333333}],
              "hull": [0, 1]},
    "potential": {"type": "locally_constant", "depth": 2, "random": {"lo": -1.2, "hi": -0.4}},
    "seed": 11,
    "beta_grid": {"min": -5, "max": 5, "step": 0.25},
    "depths": {"staircase": 10, "coarse": 8},
    "points": [0.0, 0.3]
  })";
  std::ofstream(root / "scene.json") << config;
  int failures = 0;
  for (const char* run : {"a", "b"}) {
    for (const char* cmd : {"spectrum", "staircase", "hoelder", "coarse", "conjugacy"}) {
      const std::string cfg = (root / "scene.json").string(), out = (root / run).string();
      const char* argv[] = {"multifrac", "--config", cfg.c_str(), "--out", out.c_str(), cmd};
      std::ostringstream o, e;
      if (cli::run(6, argv, o, e) != 0) ++failures;
    }
  }
  int files = 0, differ = 0, bad_numbers = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    const std::string a = slurp(entry.path());
    if (a != slurp(root / "b" / entry.path().filename())) ++differ;
    if (entry.path().extension() == ".csv" && !all_cells_finite(a)) ++bad_numbers;
  }
  return {failures == 0 && files > 0 && differ == 0 && bad_numbers == 0,
          std::to_string(files) + " files, " + std::to_string(differ) + " differ, " + std::to_string(bad_numbers) +
              " with non-finite values, " + std::to_string(failures) + " failed runs"};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10, criterion11};
  const double limits[] = {5, 0, 0, 0, 60, 0, 10, 0, 0, 0, 0};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[i] > 0 && secs >= limits[i]) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", limits[i]) + " s limit";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu: %s (%.2f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
