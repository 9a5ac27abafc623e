#pragma once

#include <boost/container/small_vector.hpp>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gpisos/rational.hpp"

namespace gpisos {

/// Exponent vector over a fixed variable count.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// vectors lexicographically in declared variable order (so a^2 > a*b > b^2).
class Monomial {
 public:
  using Exponent = std::uint32_t;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  Monomial(std::initializer_list<Exponent> exps);
  explicit Monomial(std::span<const Exponent> exps);

  std::size_t size() const { return exps_.size(); }
  Exponent operator[](std::size_t i) const { return exps_[i]; }
  void set(std::size_t i, Exponent e);
  std::uint64_t degree() const { return degree_; }
  bool is_one() const { return degree_ == 0; }
  std::span<const Exponent> exponents() const { return {exps_.data(), exps_.size()}; }

  Monomial operator*(const Monomial& other) const;
  bool divides(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.degree_ == b.degree_ && a.exps_ == b.exps_;
  }
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

 private:
  boost::container::small_vector<Exponent, 8> exps_;
  std::uint64_t degree_ = 0;
};

/// Ordered list of variable names shared by polynomials.
class Ring {
 public:
  explicit Ring(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Ring& a, const Ring& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
};

using RingPtr = std::shared_ptr<const Ring>;

RingPtr make_ring(std::vector<std::string> names);
bool same_ring(const RingPtr& a, const RingPtr& b);

/// Sparse multivariate polynomial with exact rational coefficients.
/// No stored coefficient is ever zero, so equality is term-map equality.
class MultiPoly {
 public:
  using TermMap = std::map<Monomial, BigRational>;

  explicit MultiPoly(RingPtr ring);
  MultiPoly(RingPtr ring, TermMap terms);

  static MultiPoly constant(RingPtr ring, const BigRational& c);
  static MultiPoly variable(RingPtr ring, std::string_view name);
  static MultiPoly monomial(RingPtr ring, const Monomial& m, const BigRational& c = 1);

  const Ring& ring() const { return *ring_; }
  const RingPtr& ring_ptr() const { return ring_; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }
  /// Total degree; -1 for the zero polynomial.
  long total_degree() const;
  /// Largest exponent of variable `var` (0 for the zero polynomial).
  Monomial::Exponent degree_in(std::size_t var) const;

  BigRational coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, const BigRational& c);

  BigRational evaluate(std::span<const BigRational> point) const;

  MultiPoly& operator+=(const MultiPoly& other);
  MultiPoly& operator-=(const MultiPoly& other);
  MultiPoly& operator*=(const BigRational& c);
  MultiPoly operator-() const;

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, const BigRational& c) { return a *= c; }
  friend MultiPoly operator*(const BigRational& c, MultiPoly a) { return a *= c; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b);

  /// Human-readable form, leading (graded-lex largest) term first.
  std::string to_string() const;

 private:
  void require_same_ring(const MultiPoly& other, const char* op) const;

  RingPtr ring_;
  TermMap terms_;
};

MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q);
MultiPoly poly_pow(const MultiPoly& p, unsigned k);

/// p^k discarding every intermediate term whose exponent of variable i exceeds
/// caps[i]. Valid for extracting coefficients at or below the caps because
/// exponents only grow under multiplication.
MultiPoly poly_pow_truncated(const MultiPoly& p, unsigned k,
                             std::span<const std::optional<Monomial::Exponent>> caps);

BigRational coefficient_of(const MultiPoly& p, const Monomial& m);

/// Coefficient of the partial monomial prod_i vars[i]^exps[i], as a polynomial
/// over `target`, which must contain every remaining variable of p's ring that
/// occurs in the extracted terms.
MultiPoly coefficient_in(const MultiPoly& p, std::span<const std::size_t> vars,
                         std::span<const Monomial::Exponent> exps, const RingPtr& target);

/// Replaces `var` by `replacement`. The result lives in replacement's ring,
/// which must contain every other variable of p's ring.
MultiPoly substitute(const MultiPoly& p, std::string_view var, const MultiPoly& replacement);

/// Simultaneous substitution of every variable of p's ring by images[i],
/// all of which share one target ring.
MultiPoly compose(const MultiPoly& p, std::span<const MultiPoly> images, const RingPtr& target);

/// Re-expresses p over `target` by variable name.
MultiPoly change_ring(const MultiPoly& p, const RingPtr& target);

/// Polynomial in `var`^factor re-expressed in `var`: every exponent of `var`
/// must be divisible by factor and is divided by it.
MultiPoly deflate_variable(const MultiPoly& p, std::string_view var, Monomial::Exponent factor);

/// Parses "3*a^2*b - 1/2*c + 7" style text over `ring`.
MultiPoly parse_poly(std::string_view text, const RingPtr& ring);

}  // namespace gpisos
