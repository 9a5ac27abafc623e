#include "doctest.h"

#include <numeric>
#include <random>

#include "gpisos/errors.hpp"
#include "gpisos/moments.hpp"
#include "test_support.hpp"

using namespace gpisos;
using gpisos::testing::random_rational;

namespace {

// Covariance form whose entries are the free symbols L_kl.
CovarianceForm symbolic_covariance(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) names.push_back("L" + std::to_string(k + 1) + std::to_string(l + 1));
  }
  CovarianceForm cov;
  cov.ring = make_ring(names);
  cov.n = n;
  cov.entries.assign(n * n, MultiPoly(cov.ring));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      auto v = MultiPoly::variable(cov.ring, "L" + std::to_string(k + 1) + std::to_string(l + 1));
      cov.entries[k * n + l] = v;
      cov.entries[l * n + k] = v;
    }
  }
  return cov;
}

// Lower-triangular construction with random small rationals, some cells
// replaced by free variables.
Construction random_construction(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::vector<std::string>> cells(n, std::vector<std::string>(n));
  std::uniform_int_distribution<int> kind(0, 3);
  char next = 'a';
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      const int what = kind(rng);
      if (what == 0 && next <= 'e') {
        cells[k][j] = std::string(1, next++);
      } else if (what != 1 || j == k) {
        cells[k][j] = to_string(random_rational(rng, -3, 3, 3));
      }
    }
  }
  return make_construction(cells);
}

}  // namespace

TEST_CASE("double_factorial") {
  CHECK(double_factorial(-1) == 1);
  CHECK(double_factorial(1) == 1);
  CHECK(double_factorial(5) == 15);
  CHECK(double_factorial(7) == 105);
  CHECK_THROWS_AS(double_factorial(4), DomainError);
  CHECK_THROWS_AS(double_factorial(-3), DomainError);
}

TEST_CASE("moment_by_coefficient examples") {
  auto c1 = symbolic_covariance(1);
  CHECK(moment_by_coefficient(c1, {2}) == parse_poly("3*L11^2", c1.ring));
  auto c2 = symbolic_covariance(2);
  CHECK(moment_by_coefficient(c2, {1, 1}) == parse_poly("L11*L22 + 2*L12^2", c2.ring));
  CHECK_THROWS_AS(moment_by_coefficient(c2, {1, 1, 1}), StructuralError);

  // Diagonal covariance: the moment factorizes.
  auto c3 = symbolic_covariance(3);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = 0; l < 3; ++l) {
      if (k != l) c3.entries[k * 3 + l] = MultiPoly(c3.ring);
    }
  }
  ExponentVector m{2, 1, 3};
  CHECK(moment_by_coefficient(c3, m) == parse_poly("45*L11^2*L22*L33^3", c3.ring));
  CHECK(moment_by_coefficient(c3, m) == independent_moment(c3, m));
}

TEST_CASE("moment_by_wick examples") {
  auto single = make_construction({{"1"}});
  CHECK(moment_by_wick(single, {2}) == MultiPoly::constant(single.ring, 3));
  auto two = make_construction({{"1", ""}, {"a", "1"}});
  CHECK(moment_by_wick(two, {1, 1}) == parse_poly("3*a^2 + 1", two.ring));
  CHECK(wick_expectation(two, {2, 1}).is_zero());
  CHECK(wick_expectation(two, {1, 0}).is_zero());
  CHECK_THROWS_AS(moment_by_wick(two, {7, 6}), ResourceError);
  CHECK(moment_by_wick(two, {7, 6}, 26) == moment_by_coefficient(covariance(two), {7, 6}));
}

TEST_CASE("symbolic_moment examples") {
  auto single = make_construction({{"1"}});
  auto k0 = symbolic_moment(single, {0}, 0);
  CHECK(k0 == MultiPoly::constant(k0.ring_ptr(), 1));

  auto same = make_construction({{"1", ""}, {"1", ""}});
  auto k1 = symbolic_moment(same, {0, 1}, 0);
  CHECK(k1 == parse_poly("2*m + 1", k1.ring_ptr()));
  auto k2 = symbolic_moment(same, {0, 2}, 0);
  CHECK(k2 == parse_poly("4*m^2 + 8*m + 3", k2.ring_ptr()));

  auto impure = make_construction({{"1", ""}, {"a", "1"}});
  CHECK_THROWS_AS(symbolic_moment(impure, {1, 1}, 1), DomainError);
}

TEST_CASE("property: coefficient extraction agrees with Wick pairing") {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + iter % 4;
    const unsigned budget = 6;
    ExponentVector m(n, 1);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const unsigned extra = std::uniform_int_distribution<unsigned>(0, budget - static_cast<unsigned>(n))(rng);
    for (unsigned e = 0; e < extra; ++e) ++m[pick(rng)];
    REQUIRE(std::accumulate(m.begin(), m.end(), 0U) <= budget);
    auto c = random_construction(rng, n);
    CHECK(moment_by_coefficient(covariance(c), m) == moment_by_wick(c, m));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("property: symbolic moment matches concrete exponents") {
  const std::vector<std::pair<Construction, ExponentVector>> instances{
      {make_construction({{"1", "", ""}, {"a", "1", ""}, {"b", "1", ""}}), {0, 3, 2}},
      {make_construction({{"1", "", "", ""}, {"a", "1", "", ""}, {"b", "c", "1", ""}, {"d", "e", "1", ""}}),
       {0, 1, 1, 1}},
      {make_construction({{"1", "", "", ""}, {"a", "1", "", ""}, {"b", "1", "", ""}, {"c", "d", "1", ""}}),
       {0, 1, 1, 1}},
      {make_construction({{"1", "", "", ""}, {"a", "1", "", ""}, {"b", "1", "", ""}, {"c", "1", "", ""}}),
       {0, 1, 1, 1}},
  };
  for (const auto& [c, pattern] : instances) {
    const auto sym = symbolic_moment(c, pattern, 0);
    for (unsigned mstar = 1; mstar <= 6; ++mstar) {
      ExponentVector m = pattern;
      m[0] = mstar;
      auto at = substitute(sym, "m", MultiPoly::constant(c.ring, mstar));
      at *= BigRational(double_factorial(2 * static_cast<long>(mstar) - 1));
      CHECK(at == moment_by_coefficient(covariance(c), m));
    }
  }
}

TEST_CASE("property: permutation equivariance") {
  std::mt19937_64 rng(22);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t n = 2 + iter % 3;
    auto cov = symbolic_covariance(n);
    ExponentVector m(n);
    for (auto& v : m) v = std::uniform_int_distribution<unsigned>(1, 2)(rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CovarianceForm permuted_cov = cov;
    ExponentVector permuted_m(n);
    for (std::size_t k = 0; k < n; ++k) {
      permuted_m[k] = m[perm[k]];
      for (std::size_t l = 0; l < n; ++l) permuted_cov.entries[k * n + l] = cov(perm[k], perm[l]);
    }
    CHECK(moment_by_coefficient(permuted_cov, permuted_m) == moment_by_coefficient(cov, m));
  }
}

TEST_CASE("property: scaling a row scales the moment") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t n = 1 + iter % 3;
    auto c = random_construction(rng, n);
    ExponentVector m(n);
    for (auto& v : m) v = std::uniform_int_distribution<unsigned>(1, 2)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    BigRational lambda = random_rational(rng, 1, 9, 7);
    if (iter % 2) lambda = -lambda;
    Construction scaled = c;
    for (auto& e : scaled.rows[k]) e *= lambda;
    BigRational factor = 1;
    for (unsigned i = 0; i < 2 * m[k]; ++i) factor *= lambda;
    CHECK(moment_by_coefficient(covariance(scaled), m) == moment_by_coefficient(covariance(c), m) * factor);
  }
}
