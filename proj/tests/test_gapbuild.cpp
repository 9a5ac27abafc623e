#include "doctest.h"

#include <map>
#include <random>

#include "gpisos/errors.hpp"
#include "gpisos/gapbuild.hpp"
#include "published_expansions.hpp"
#include "test_support.hpp"

using namespace gpisos;
using gpisos::testing::random_rational;

namespace {

std::vector<std::string> ring_names(const Construction& c) { return c.ring->names(); }

BigRational at(const MultiPoly& p, std::vector<BigRational> point) { return p.evaluate(point); }

}  // namespace

TEST_CASE("enumerate_cases shapes") {
  auto three = enumerate_cases(3);
  REQUIRE(three.size() == 1);
  CHECK(ring_names(three[0]) == std::vector<std::string>{"a", "b"});
  CHECK(three[0].describe() == "X1 = U1; X2 = a*U1 + U2; X3 = b*U1 + U2");

  auto four = enumerate_cases(4);
  REQUIRE(four.size() == 3);
  CHECK(ring_names(four[0]) == std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(ring_names(four[1]) == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(ring_names(four[2]) == std::vector<std::string>{"a", "b", "c"});
  CHECK(four[0].describe() == "X1 = U1; X2 = a*U1 + U2; X3 = b*U1 + c*U2 + U3; X4 = d*U1 + e*U2 + U3");
  CHECK(four[1].describe() == "X1 = U1; X2 = a*U1 + U2; X3 = b*U1 + U2; X4 = c*U1 + d*U2 + U3");
  CHECK(four[2].describe() == "X1 = U1; X2 = a*U1 + U2; X3 = b*U1 + U2; X4 = c*U1 + U2");

  auto two = enumerate_cases(2);
  REQUIRE(two.size() == 1);
  CHECK(two[0].describe() == "X1 = U1; X2 = a*U1");

  CHECK_THROWS_AS(enumerate_cases(1), DomainError);
  CHECK(enumerate_cases(5).size() == 5);
}

TEST_CASE("generated cases keep X_n inside a rank-deficient span or add one direction") {
  for (std::size_t n = 3; n <= 6; ++n) {
    for (const auto& c : enumerate_cases(n)) {
      CHECK(c.is_pure_row(0));
      // Every row is a lower-triangular combination of U_1..U_{n-1}.
      for (std::size_t k = 0; k < n; ++k) CHECK(c.rows[k][n - 1].is_zero());
    }
  }
}

TEST_CASE("build_gap reproduces the published concrete expansions") {
  auto f432 = build_gap({4, 3, 2}, enumerate_cases(3)[0]);
  CHECK(f432.poly == parse_poly(published::kF432, f432.poly.ring_ptr()));
  CHECK(f432.poly.coefficient(Monomial{0, 0}) == 94500);
  CHECK(f432.poly.coefficient(Monomial{6, 4}) == 34454700);

  const char* cases[] = {published::kF2111Case1, published::kF2111Case2, published::kF2111Case3};
  auto four = enumerate_cases(4);
  for (std::size_t i = 0; i < 3; ++i) {
    auto g = build_gap({2, 1, 1, 1}, four[i]);
    CHECK(g.poly == parse_poly(cases[i], g.poly.ring_ptr()));
  }
  auto case3 = build_gap({2, 1, 1, 1}, four[2]);
  CHECK(case3.poly.coefficient(Monomial{0, 0, 0}) == 42);
  CHECK(case3.poly.coefficient(Monomial{2, 2, 2}) == 942);
}

TEST_CASE("build_gap is zero under independence") {
  auto c = make_construction({{"1", "", ""}, {"0", "1", ""}, {"0", "0", "1"}});
  CHECK(build_gap({3, 1, 2}, c).poly.is_zero());
  CHECK_THROWS_AS(build_gap({1, 1}, c), StructuralError);
}

TEST_CASE("build_gap_symbolic reproduces the published symbolic expansions") {
  auto pattern = parse_exponents("m,3,2");
  auto g = build_gap_symbolic(pattern, enumerate_cases(3)[0]);
  CHECK(g.normalization == Normalization::symbolic_double_factorial);
  CHECK(g.poly == parse_poly(published::kFm32, g.poly.ring_ptr()));
  CHECK(g.poly.coefficient(Monomial{0, 0, 0}) == 450);
  CHECK(g.poly.coefficient(Monomial{6, 4, 10}) == 16);

  const char* cases[] = {published::kFm111Case1, published::kFm111Case2, published::kFm111Case3};
  auto four = enumerate_cases(4);
  for (std::size_t i = 0; i < 3; ++i) {
    auto s = build_gap_symbolic(parse_exponents("m,1,1,1"), four[i]);
    CHECK(s.poly == parse_poly(cases[i], s.poly.ring_ptr()));
  }
  auto case3 = build_gap_symbolic(parse_exponents("m,1,1,1"), four[2]);
  CHECK(case3.poly.coefficient(Monomial{0, 0, 0, 0}) == 7);
  CHECK(case3.poly.coefficient(Monomial{2, 2, 2, 6}) == 4);

  auto impure = make_construction({{"a", "1"}, {"1", ""}});
  CHECK_THROWS_AS(build_gap_symbolic(parse_exponents("m,1"), impure), DomainError);
}

TEST_CASE("property: symbolic and concrete gaps agree for m = 1..6") {
  const std::vector<std::pair<std::string, std::size_t>> patterns{{"m,3,2", 3}, {"m,1,1,1", 4}};
  for (const auto& [text, n] : patterns) {
    for (const auto& c : enumerate_cases(n)) {
      auto sym = build_gap_symbolic(parse_exponents(text), c);
      for (unsigned mstar = 1; mstar <= 6; ++mstar) {
        // p^2 = m* - 1: substitute p^2 through deflation to stay polynomial.
        auto in_p2 = deflate_variable(sym.poly, "p", 2);
        auto concrete_ring_value = substitute(in_p2, "p", MultiPoly::constant(c.ring, mstar - 1));
        concrete_ring_value *= BigRational(2 * double_factorial(2 * static_cast<long>(mstar) - 1));
        ExponentVector m = parse_exponents(text).values;
        m[0] = mstar;
        CHECK(concrete_ring_value == build_gap(m, c).poly);
      }
    }
  }
  // The printed constants pair up: 450 * 210 = 94500 and 7 * 6 = 42.
  CHECK(BigRational(450) * BigRational(2 * double_factorial(7)) == 94500);
  CHECK(BigRational(7) * BigRational(2 * double_factorial(3)) == 42);
}

TEST_CASE("enumerate_subproblems") {
  auto plan = enumerate_subproblems(parse_exponents("4,3,2"));
  REQUIRE(plan.instances.size() == 2);
  CHECK(plan.instances[0].exponents.to_string() == "4,3,1");
  CHECK(plan.instances[1].exponents.to_string() == "4,3,2");
  CHECK_FALSE(plan.instances[0].strict_required);
  CHECK(plan.instances[1].strict_required);
  REQUIRE(plan.recursive.has_value());
  CHECK(plan.recursive->to_string() == "4,3");

  plan = enumerate_subproblems(parse_exponents("2,1,1,1"));
  REQUIRE(plan.instances.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(plan.instances[i].case_id == i + 1);
    CHECK(plan.instances[i].exponents.to_string() == "2,1,1,1");
  }
  CHECK(plan.recursive->to_string() == "2,1,1");

  plan = enumerate_subproblems(parse_exponents("1,1"));
  REQUIRE(plan.instances.size() == 1);
  CHECK_FALSE(plan.recursive.has_value());
  auto g = build_instance(plan.instances[0]);
  CHECK(g.poly == parse_poly("2*a^2", g.poly.ring_ptr()));

  // Every k from 1 to m_n appears exactly once per case.
  plan = enumerate_subproblems(parse_exponents("1,2,3,2"));
  std::map<std::pair<std::size_t, unsigned>, int> seen;
  for (const auto& inst : plan.instances) ++seen[{inst.case_id, *inst.reduction_k}];
  CHECK(seen.size() == 3 * 2);
  for (const auto& [key, count] : seen) CHECK(count == 1);
}

TEST_CASE("parse_exponents") {
  CHECK(parse_exponents("4, 3,2").to_string() == "4,3,2");
  CHECK(parse_exponents("m,3,2").symbolic == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(parse_exponents("4,0"), DomainError);
  CHECK_THROWS_AS(parse_exponents("4,m"), DomainError);
  CHECK_THROWS_AS(parse_exponents("x"), DomainError);
  CHECK_THROWS_AS(parse_exponents(""), DomainError);
}

TEST_CASE("build_conjecture_H") {
  auto h = build_conjecture_H(3, {1, 1, 1});
  CHECK(h.ring().names() == std::vector<std::string>{"x21", "x31", "x32"});
  CHECK(at(h, {0, 0, 0}) == 0);
  CHECK(h.total_degree() % 2 == 0);

  // Value at (1,1,1) from Wick pairing applied to both terms at that point.
  auto point = make_construction({{"1", "", ""}, {"1", "1", ""}, {"1", "1", "1"}});
  const BigRational moment = wick_expectation(point, {2, 2, 2}).coefficient(Monomial(0));
  BigRational product = wick_expectation(make_construction({{"1"}}), {2}).coefficient(Monomial(0));
  product *= wick_expectation(make_construction({{"1", ""}, {"1", "1"}}), {0, 2}).coefficient(Monomial(0));
  product *= wick_expectation(point, {0, 0, 2}).coefficient(Monomial(0));
  CHECK(at(h, {1, 1, 1}) == moment - product);

  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    std::vector<BigRational> x{random_rational(rng, -20, 20, 7), random_rational(rng, -20, 20, 7),
                               random_rational(rng, -20, 20, 7)};
    CHECK(h.evaluate(x) >= 0);
  }
  CHECK_THROWS_AS(build_conjecture_H(2, {1, 1}), DomainError);

  // H coincides with the gap polynomial of the full construction.
  CHECK(build_conjecture_H(3, {2, 1, 1}) == build_gap({2, 1, 1}, full_construction(3)).poly);
}

TEST_CASE("property: generated gap polynomials are nonnegative at random points") {
  std::mt19937_64 rng(32);
  std::vector<GapPolynomial> gaps;
  for (const auto& text : {"4,3,2", "2,1,1,1", "1,1", "3,2", "2,2,1"}) {
    for (const auto& inst : enumerate_subproblems(parse_exponents(text)).instances) gaps.push_back(build_instance(inst));
  }
  for (const auto& text : {"m,3,2", "m,1,1,1"}) {
    for (const auto& inst : enumerate_subproblems(parse_exponents(text)).instances) gaps.push_back(build_instance(inst));
  }
  for (const auto& g : gaps) {
    const std::size_t nv = g.poly.ring().size();
    for (int i = 0; i < 1000; ++i) {
      std::vector<BigRational> x(nv);
      for (auto& v : x) v = random_rational(rng, -12, 12, 5);
      CHECK(g.poly.evaluate(x) >= 0);
    }
  }
}
