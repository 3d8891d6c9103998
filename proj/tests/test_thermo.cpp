#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "multifrac/errors.hpp"
#include "multifrac/thermo.hpp"

using namespace multifrac;

namespace {

// Dense transfer matrix of a depth-m table: u -> (u_2..u_m, j) with weight exp(f(u)).
Eigen::MatrixXd dense_transfer(const LocalTable& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto s = static_cast<std::size_t>(t.alphabet().size());
  const std::size_t tails = t.size() / s;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t u = 0; u < t.size(); ++u) {
    for (std::size_t j = 0; j < s; ++j) {
      M(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>((u % tails) * s + j)) = std::exp(t[u]);
    }
  }
  return M;
}

double eigen_log_radius(const LocalTable& t) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense_transfer(t));
  double r = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return std::log(r);
}

LocalTable random_table(int s, int m, unsigned seed, double lo = -3.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(ipow(s, static_cast<std::size_t>(m)));
  for (double& x : v) x = u(rng);
  return LocalTable(Alphabet(s), m, std::move(v));
}

CombinedPotential only_psi(const Potential& psi) { return {0.0, 1.0, psi, psi}; }

}  // namespace

TEST_CASE("periodic pressure of probability vectors vanishes") {
  for (int n = 1; n <= 8; ++n) {
    CHECK(pressure_periodic(only_psi(fixtures::bernoulli(0.5, 0.5)), n).value == 0.0);
    CHECK(std::fabs(pressure_periodic(only_psi(fixtures::bernoulli(0.3, 0.7)), n).value) <= 1e-15);
  }
  const Potential phi = Potential::geometric(fixtures::dyadic());
  const auto p = pressure_periodic({1.0, 0.0, phi, fixtures::bernoulli(0.3, 0.7)}, 5);
  CHECK(std::fabs(p.value) <= 1e-12);
  CHECK(p.lower <= p.value);
  CHECK(p.value <= p.upper);
  CHECK(p.method == PressureEstimate::Method::periodic);
}

TEST_CASE("spectral pressure small cases") {
  CHECK(std::fabs(pressure_spectral(only_psi(fixtures::bernoulli(0.3, 0.7))).value) <= 1e-15);
  const Potential two = Potential::symbol_log_weights({std::log(2.0), std::log(2.0)});
  CHECK(pressure_spectral(only_psi(two)).value == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 1.0);
    std::vector<double> v{u(rng), u(rng), u(rng)};
    const double want = std::log(std::exp(v[0]) + std::exp(v[1]) + std::exp(v[2]));
    CHECK(pressure_spectral(only_psi(Potential::symbol_log_weights(v))).value ==
          doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("spectral radius matches a dense eigen-solver") {
  for (int s = 2; s <= 3; ++s) {
    for (int m = 1; m <= 3; ++m) {
      for (unsigned seed = 1; seed <= 4; ++seed) {
        const LocalTable t = random_table(s, m, seed * 31 + static_cast<unsigned>(s * 7 + m));
        const PerronData pd = perron_data(t);
        const double want = eigen_log_radius(t);
        CHECK(pd.log_radius == doctest::Approx(want).epsilon(1e-12));
        CHECK(pd.log_lower <= pd.log_radius);
        CHECK(pd.log_upper >= pd.log_radius);
        CHECK(pd.log_lower >= want - 1e-11);
        CHECK(pd.log_upper <= want + 1e-11);
      }
    }
  }
}

TEST_CASE("perron vectors are eigenvectors") {
  const LocalTable t = random_table(2, 3, 99);
  const Eigen::MatrixXd M = dense_transfer(t);
  const PerronData pd = perron_data(t);
  const double lambda = std::exp(pd.log_radius);
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::VectorXd r(n), l(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i) = pd.right[static_cast<std::size_t>(i)];
    l(i) = pd.left[static_cast<std::size_t>(i)];
  }
  CHECK((M * r - lambda * r).norm() <= 1e-11 * r.norm() * lambda);
  CHECK((M.transpose() * l - lambda * l).norm() <= 1e-11 * l.norm() * lambda);
}

TEST_CASE("depth-2 spectral pressure lies in the periodic bracket") {
  for (unsigned long long seed : {7ull, 11ull, 2026ull}) {
    const Potential psi = Potential::locally_constant(2, 2, random_table(2, 2, static_cast<unsigned>(seed)).values());
    const auto spec = pressure_spectral(only_psi(psi));
    const auto per = pressure_periodic(only_psi(psi), 12);
    CHECK(per.lower <= spec.value + 1e-14);
    CHECK(spec.value <= per.upper + 1e-14);
    CHECK(per.lower <= per.value);
    CHECK(per.value <= per.upper);
  }
}

TEST_CASE("pressure is shift-equivariant and monotone") {
  const Potential psi = Potential::locally_constant(2, 2, random_table(2, 2, 3).values());
  const double base = pressure_spectral(only_psi(psi)).value;
  for (double c : {-1.5, 0.25, 2.0}) {
    CHECK(pressure_spectral(only_psi(psi.shifted(c))).value == doctest::Approx(base + c).epsilon(1e-14));
    const auto p = pressure_periodic(only_psi(psi.shifted(c)), 8);
    CHECK(p.lower <= base + c + 1e-12);
    CHECK(base + c <= p.upper + 1e-12);
  }
  auto v = random_table(2, 2, 3).values();
  v[2] += 0.3;
  CHECK(pressure_spectral(only_psi(Potential::locally_constant(2, 2, v))).value > base);
}

TEST_CASE("pressure strictly decreases in t") {
  const Potential phi = Potential::geometric(fixtures::thirds());
  const Potential psi = fixtures::bernoulli(0.2, 0.8);
  const double min_abs_phi = -std::log(2.0 / 3.0);
  double prev = INFINITY, prev_t = 0.0;
  for (double t = -2.0; t <= 3.0; t += 0.25) {
    const double p = pressure_spectral({t, 0.7, phi, psi}).value;
    if (std::isfinite(prev)) CHECK(prev - p >= (t - prev_t) * min_abs_phi - 1e-12);
    prev = p;
    prev_t = t;
  }
}

TEST_CASE("moebius periodic brackets nest and contain the spectral enclosure") {
  const Potential phi = Potential::geometric(fixtures::moebius_pair());
  const CombinedPotential f{1.0, 0.0, phi, phi};
  for (int n = 2; n <= 5; ++n) {
    const auto a = pressure_periodic(f, n);
    const auto b = pressure_periodic(f, 2 * n);
    CHECK(b.lower >= std::nextafter(a.lower, -INFINITY));
    CHECK(b.upper <= std::nextafter(a.upper, INFINITY));
  }
  PressureOptions deep;
  deep.approximation_depth = 12;
  const auto s = pressure_spectral(f, deep);
  const auto p = pressure_periodic(f, 10);
  CHECK(s.lower <= s.value);
  CHECK(s.value <= s.upper);
  // Both are certified enclosures of the same number.
  CHECK(std::max(s.lower, p.lower) <= std::min(s.upper, p.upper));
  CHECK(p.width() <= 0.01);
}

TEST_CASE("bernoulli gibbs measures are products") {
  const MarkovMeasure mu = MarkovMeasure::from_potential(fixtures::bernoulli(0.3, 0.7));
  CHECK_FALSE(mu.approximate());
  CHECK(gibbs_cylinder_measure(mu, Word{1, 2}) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(gibbs_cylinder_measure(mu, Word{2, 2, 2}) == doctest::Approx(0.343).epsilon(1e-15));
  CHECK(mu.mass(Word{}) == 1.0);
  CHECK(std::fabs(mu.pressure_shift()) <= 1e-15);
}

TEST_CASE("markov measures are consistent and stationary") {
  const Potential psi = fixtures::seeded_depth2();
  const MarkovMeasure mu = MarkovMeasure::from_potential(psi);
  double total = 0.0;
  for (const Word& w : enumerate_words(Alphabet(2), 2)) total += mu.mass(w);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 1; n <= 8; ++n) {
    double sum = 0.0;
    for (const Word& w : enumerate_words(Alphabet(2), n)) {
      const double m = mu.mass(w);
      CHECK(m >= 0.0);
      sum += m;
      CHECK(m == doctest::Approx(mu.mass(w.extended(1)) + mu.mass(w.extended(2))).epsilon(1e-12));
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-10);
  }
  // Shift invariance: mass(gamma) = sum_j mass(j gamma).
  for (const Word& w : enumerate_words(Alphabet(2), 3)) {
    CHECK(mu.mass(w) == doctest::Approx(mu.mass(concat(Word{1}, w)) + mu.mass(concat(Word{2}, w))).epsilon(1e-12));
  }
}

TEST_CASE("gibbs constants") {
  const std::vector<int> depths{1, 2, 4, 6, 8};
  const Potential b = fixtures::bernoulli(0.3, 0.7);
  const auto pb = gibbs_constant_probe(MarkovMeasure::from_potential(b), b, depths);
  for (double m : pb.maxima) CHECK(m <= 1e-12);

  const Potential uniform = Potential::symbol_log_weights({-std::log(3.0), -std::log(3.0), -std::log(3.0)});
  CHECK(gibbs_constant_probe(MarkovMeasure::from_potential(uniform), uniform, depths).bound <= 1e-12);

  const Potential psi = normalize_potential(Potential::locally_constant(2, 2, random_table(2, 2, 17).values()));
  const auto pd = gibbs_constant_probe(MarkovMeasure::from_potential(psi), psi, std::vector<int>{2, 4, 6, 8});
  REQUIRE(pd.maxima.size() == 4);
  for (double m : pd.maxima) CHECK(m <= pd.maxima[0] * 1.1 + 1e-12);
  MESSAGE("depth-2 gibbs constant: " << pd.bound);
}

TEST_CASE("normalization") {
  const Potential psi = Potential::locally_constant(2, 2, random_table(2, 2, 23).values());
  const Potential n = normalize_potential(psi);
  CHECK(std::fabs(pressure_spectral(only_psi(n)).value) <= 1e-14);
  const MarkovMeasure a = MarkovMeasure::from_potential(psi);
  const MarkovMeasure b = MarkovMeasure::from_potential(n);
  CHECK(a.pressure_shift() == doctest::Approx(pressure_spectral(only_psi(psi)).value).epsilon(1e-14));
  for (const Word& w : enumerate_words(Alphabet(2), 5)) CHECK(a.mass(w) == doctest::Approx(b.mass(w)).epsilon(1e-13));
}

TEST_CASE("equilibrium integrals of the binomial cascade") {
  const Potential phi = Potential::geometric(fixtures::dyadic());
  const Potential psi = fixtures::bernoulli(0.3, 0.7);
  const auto a = equilibrium_integrals(1.0, 0.0, phi, psi, 1);
  CHECK(a.phi == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(a.psi == doctest::Approx(0.5 * (std::log(0.3) + std::log(0.7))).epsilon(1e-14));
  const auto b = equilibrium_integrals(0.0, 1.0, phi, psi, 1);
  CHECK(b.psi == doctest::Approx(0.3 * std::log(0.3) + 0.7 * std::log(0.7)).epsilon(1e-14));
  const Potential sym = fixtures::bernoulli(0.5, 0.5);
  for (double beta : {-3.0, 0.0, 2.5}) {
    CHECK(equilibrium_integrals(1.0 - beta, beta, phi, sym, 1).psi == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  }
}

TEST_CASE("table brackets of geometric potentials enclose the potential") {
  const Potential phi = Potential::geometric(fixtures::moebius_pair());
  const TableBracket tb = potential_tables(phi, 6);
  CHECK_FALSE(tb.exact);
  for (std::size_t u = 0; u < tb.mid.size(); ++u) {
    CHECK(tb.lower[u] <= tb.mid[u]);
    CHECK(tb.mid[u] <= tb.upper[u]);
    // The fixed point of the state word lies in its cylinder.
    const Word w = word_from_index(u, 6, 2);
    const double x = fixed_point(*phi.ifs(), w.drop_front(1).extended(w.front()));
    const double v = std::log(phi.ifs()->branch(w.front()).derivative(x));
    CHECK(v >= tb.lower[u] - 1e-12);
    CHECK(v <= tb.upper[u] + 1e-12);
  }
}

TEST_CASE("pressure errors") {
  const Potential b = fixtures::bernoulli(0.3, 0.7);
  CHECK_THROWS_AS(pressure_periodic(only_psi(b), 0), ValidationError);
  CHECK_THROWS_AS(pressure_periodic(only_psi(b), 30), BudgetError);
  PressureOptions few;
  few.max_iterations = 1;
  CHECK_THROWS_AS(perron_data(random_table(2, 3, 1), few), NumericalError);
  const Potential three = Potential::symbol_log_weights({-1.0, -1.0, -1.0});
  CHECK_THROWS_AS(pressure_spectral({1.0, 1.0, b, three}), ValidationError);
}
