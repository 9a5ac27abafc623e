#include "doctest.h"

#include <random>

#include "gpisos/errors.hpp"
#include "gpisos/matrix.hpp"
#include "gpisos/polynomial.hpp"
#include "gpisos/rational.hpp"
#include "test_support.hpp"

using namespace gpisos;
using gpisos::testing::letters_ring;
using gpisos::testing::random_poly;
using gpisos::testing::random_rational;

TEST_CASE("rationals stay canonical") {
  BigRational q(6, -4);
  q.canonicalize();
  CHECK(to_string(q) == "-3/2");
  CHECK(to_string(make_rational(4, 2)) == "2");
  CHECK(parse_rational("10/4") == BigRational(5, 2));
  CHECK(parse_rational("-7") == -7);
  CHECK_THROWS_AS(parse_rational("10/4", true), StructuralError);
  CHECK_THROWS_AS(parse_rational("1/0"), StructuralError);
  CHECK_THROWS_AS(parse_rational("1.5"), StructuralError);
  CHECK_THROWS_AS(parse_rational("+3", true), StructuralError);
  CHECK_THROWS_AS(parse_rational("03", true), StructuralError);
  CHECK(parse_rational("-593/3768", true) == BigRational(-593, 3768));
}

TEST_CASE("best_rational finds small-denominator approximations") {
  CHECK(best_rational(0.3333333333, 1000) == BigRational(1, 3));
  CHECK(best_rational(3.14159265358979, 1000) == BigRational(355, 113));
  CHECK(best_rational(-0.5, 10) == BigRational(-1, 2));
  CHECK(best_rational(2.0, 1) == 2);
  CHECK(best_rational(1.0000004, 1000) == 1);
  CHECK_THROWS_AS(best_rational(1.0 / 0.0, 10), DomainError);
}

TEST_CASE("poly_mul examples") {
  auto r = make_ring({"a", "b"});
  auto a = MultiPoly::variable(r, "a");
  auto b = MultiPoly::variable(r, "b");
  CHECK(poly_mul(a + b, a + b) == parse_poly("a^2 + 2*a*b + b^2", r));
  auto p = parse_poly("3*a^2*b - 1/2*b + 7", r);
  CHECK(poly_mul(MultiPoly::constant(r, 1), p) == p);

  auto lr = make_ring({"L11", "L12", "L22", "t1", "t2"});
  auto q = parse_poly("L11*t1^2 + 2*L12*t1*t2 + L22*t2^2", lr);
  auto sq = poly_mul(q, q);
  std::vector<std::size_t> vars{3, 4};
  std::vector<Monomial::Exponent> exps{2, 2};
  auto coeff = coefficient_in(sq, vars, exps, make_ring({"L11", "L12", "L22"}));
  CHECK(coeff == parse_poly("2*L11*L22 + 4*L12^2", make_ring({"L11", "L12", "L22"})));

  auto other = make_ring({"x"});
  CHECK_THROWS_AS(poly_mul(a, MultiPoly::variable(other, "x")), StructuralError);
}

TEST_CASE("poly_pow and coefficient_of examples") {
  auto r = make_ring({"a"});
  auto a = MultiPoly::variable(r, "a");
  CHECK(poly_pow(a + MultiPoly::constant(r, 5), 0) == MultiPoly::constant(r, 1));
  CHECK(poly_pow(a + MultiPoly::constant(r, 1), 2) == parse_poly("a^2 + 2*a + 1", r));

  auto t = make_ring({"t1", "t2"});
  auto cube = poly_pow(parse_poly("t1^2 + t2^2", t), 3);
  CHECK(coefficient_of(cube, Monomial{2, 4}) == 3);
  CHECK(coefficient_of(parse_poly("a^2", make_ring({"a", "b"})), Monomial{0, 2}) == 0);
  CHECK(coefficient_of(parse_poly("a^2 + 2*a*b", make_ring({"a", "b"})), Monomial{1, 1}) == 2);

  std::vector<std::optional<Monomial::Exponent>> caps{2, 4};
  auto trunc = poly_pow_truncated(parse_poly("t1^2 + t2^2 + t1*t2", t), 3, caps);
  auto full = poly_pow(parse_poly("t1^2 + t2^2 + t1*t2", t), 3);
  CHECK(coefficient_of(trunc, Monomial{2, 4}) == coefficient_of(full, Monomial{2, 4}));
  CHECK(coefficient_of(trunc, Monomial{6, 0}) == 0);
}

TEST_CASE("substitute examples") {
  auto rm = make_ring({"m"});
  auto rp = make_ring({"p"});
  auto p2 = parse_poly("p^2 + 1", rp);
  CHECK(substitute(parse_poly("m^2", rm), "m", p2) == parse_poly("p^4 + 2*p^2 + 1", rp));
  CHECK(substitute(parse_poly("2*m + 1", rm), "m", p2) == parse_poly("2*p^2 + 3", rp));
  auto ab = make_ring({"a", "b"});
  CHECK_THROWS_AS(substitute(parse_poly("a + b", ab), "c", p2), StructuralError);
}

TEST_CASE("ring helpers") {
  auto abm = make_ring({"a", "b", "m"});
  auto ab = make_ring({"a", "b"});
  auto p = parse_poly("a*m^2 + b", abm);
  CHECK(change_ring(parse_poly("a + b", ab), abm) == parse_poly("a + b", abm));
  CHECK_THROWS_AS(change_ring(p, ab), StructuralError);
  auto deflated = deflate_variable(parse_poly("a^4*b + a^2", ab), "a", 2);
  CHECK(deflated == parse_poly("a^2*b + a", ab));
  CHECK_THROWS_AS(deflate_variable(parse_poly("a^3", ab), "a", 2), DomainError);
  CHECK(parse_poly("a^2 - 2*a*b + 1/3", ab).to_string() == "a^2 - 2*a*b + 1/3");
  CHECK_THROWS_AS(parse_poly("a +", ab), StructuralError);
  CHECK_THROWS_AS(parse_poly("z", ab), StructuralError);
  CHECK(MultiPoly(ab).total_degree() == -1);
}

TEST_CASE("monomial order is graded lexicographic") {
  CHECK(Monomial{2, 0} > Monomial{1, 1});
  CHECK(Monomial{1, 1} > Monomial{0, 2});
  CHECK(Monomial{0, 3} > Monomial{2, 0});
  CHECK(Monomial{0, 0} < Monomial{0, 1});
}

TEST_CASE("ldlt examples") {
  auto id = RationalMatrix::identity(2);
  auto r = ldlt(id);
  CHECK(r.verdict == PsdVerdict::psd);
  CHECK(r.L == RationalMatrix::identity(2));
  CHECK(r.d == std::vector<BigRational>{1, 1});

  RationalMatrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  r = ldlt(a);
  CHECK(r.verdict == PsdVerdict::psd);
  CHECK(r.d == std::vector<BigRational>{2, BigRational(3, 2)});

  RationalMatrix swap(2, 2);
  swap(0, 1) = 1;
  swap(1, 0) = 1;
  CHECK(ldlt(swap).verdict == PsdVerdict::indefinite);

  RationalMatrix bad(2, 2);
  bad(0, 1) = 1;
  CHECK_THROWS_AS(ldlt(bad), StructuralError);

  RationalMatrix zero_block(3, 3);
  zero_block(0, 0) = 4;
  auto z = ldlt(zero_block);
  CHECK(z.verdict == PsdVerdict::psd);
  CHECK(z.complete);
}

TEST_CASE("solve_linear examples") {
  auto id = RationalMatrix::identity(3);
  std::vector<BigRational> b{1, BigRational(-2, 3), 5};
  auto s = solve_linear(id, b);
  CHECK(s.consistent);
  CHECK(s.x == b);

  RationalMatrix row(1, 2);
  row(0, 0) = 1;
  row(0, 1) = 1;
  s = solve_linear(row, {2});
  CHECK(s.consistent);
  CHECK(s.x == std::vector<BigRational>{1, 1});

  RationalMatrix col(2, 1);
  col(0, 0) = 1;
  col(1, 0) = 1;
  s = solve_linear(col, {1, 2});
  CHECK_FALSE(s.consistent);
  CHECK(s.conflicting_row.has_value());
}

TEST_CASE("property: ring axioms on random polynomials") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    auto ring = letters_ring(1 + iter % 4);
    auto p = random_poly(rng, ring, 6, 6);
    auto q = random_poly(rng, ring, 6, 6);
    auto r = random_poly(rng, ring, 6, 6);
    CHECK((p + q) * r == p * r + q * r);
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * q == q * p);
    CHECK((p - p).is_zero());
  }
}

TEST_CASE("property: substitution commutes with evaluation") {
  std::mt19937_64 rng(12);
  auto full = letters_ring(3);
  auto sub = letters_ring(2);
  for (int iter = 0; iter < 100; ++iter) {
    auto p = random_poly(rng, full, 5, 5, 20);
    auto q = random_poly(rng, sub, 3, 3, 20, 4);
    auto composed = substitute(p, "c", q);
    std::vector<BigRational> pt{random_rational(rng, -9, 9, 7), random_rational(rng, -9, 9, 7)};
    std::vector<BigRational> full_pt{pt[0], pt[1], q.evaluate(pt)};
    CHECK(composed.evaluate(pt) == p.evaluate(full_pt));
  }
}

TEST_CASE("property: ldlt reconstructs random symmetric matrices") {
  std::mt19937_64 rng(13);
  int complete = 0;
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 1 + iter % 12;
    auto a = gpisos::testing::random_symmetric(rng, n);
    auto r = ldlt(a);
    if (!r.complete) continue;
    ++complete;
    RationalMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = r.d[i];
    CHECK(permuted(a, r.perm) == r.L * d * r.L.transpose());
  }
  CHECK(complete >= 95);
}

TEST_CASE("property: ldlt reconstructs and accepts random PSD matrices") {
  std::mt19937_64 rng(14);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 1 + iter % 12;
    const std::size_t k = 1 + iter % 5;
    auto a = gpisos::testing::random_psd(rng, n, k);
    auto r = ldlt(a);
    REQUIRE(r.complete);
    CHECK(r.verdict == PsdVerdict::psd);
    RationalMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = r.d[i];
    CHECK(permuted(a, r.perm) == r.L * d * r.L.transpose());

    auto u = ldlt(a, Pivoting::none);
    REQUIRE(u.complete);
    CHECK(u.verdict == PsdVerdict::psd);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(u.perm[i] == i);
      d(i, i) = u.d[i];
    }
    CHECK(a == u.L * d * u.L.transpose());
  }
  // Unpivoted elimination flags a zero pivot facing a nonzero row.
  RationalMatrix z(2, 2);
  z(0, 1) = 1;
  z(1, 0) = 1;
  z(1, 1) = 1;
  auto zr = ldlt(z, Pivoting::none);
  CHECK(zr.verdict == PsdVerdict::indefinite);
  CHECK_FALSE(zr.complete);
}

TEST_CASE("property: PSD verdict implies nonnegative quadratic form") {
  std::mt19937_64 rng(15);
  int psd_seen = 0;
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 1 + iter % 8;
    auto a = iter % 2 == 0 ? gpisos::testing::random_psd(rng, n, 1 + iter % 3)
                           : gpisos::testing::random_symmetric(rng, n);
    auto r = ldlt(a);
    if (r.verdict != PsdVerdict::psd) continue;
    ++psd_seen;
    for (int s = 0; s < 100; ++s) {
      std::vector<BigRational> x(n);
      for (auto& v : x) v = random_rational(rng, -30, 30, 9);
      CHECK(a.quadratic_form(x) >= 0);
    }
  }
  CHECK(psd_seen >= 50);
}

TEST_CASE("property: minimum-norm solutions are orthogonal to the null space") {
  std::mt19937_64 rng(16);
  for (int iter = 0; iter < 40; ++iter) {
    const std::size_t m = 1 + iter % 4;
    const std::size_t n = m + 1 + iter % 3;
    RationalMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = random_rational(rng, -4, 4);
    }
    std::vector<BigRational> x0(n);
    for (auto& v : x0) v = random_rational(rng, -5, 5, 3);
    std::vector<BigRational> b(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) b[i] += a(i, j) * x0[j];
    }
    auto s = solve_linear(a, b);
    REQUIRE(s.consistent);
    for (std::size_t i = 0; i < m; ++i) {
      BigRational lhs = 0;
      for (std::size_t j = 0; j < n; ++j) lhs += a(i, j) * s.x[j];
      CHECK(lhs == b[i]);
    }
    // x0 - x lies in the null space, which must be orthogonal to x.
    BigRational dot = 0;
    for (std::size_t j = 0; j < n; ++j) dot += (x0[j] - s.x[j]) * s.x[j];
    CHECK(dot == 0);
  }
}
