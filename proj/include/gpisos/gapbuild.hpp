#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gpisos/moments.hpp"
#include "gpisos/polynomial.hpp"

namespace gpisos {

/// Exponent pattern as typed by a user: concrete entries plus at most one
/// symbolic entry "m" (only the first coordinate may be symbolic).
struct ExponentPattern {
  ExponentVector values;  // symbolic slot holds 0
  std::optional<std::size_t> symbolic;

  std::size_t size() const { return values.size(); }
  std::string to_string() const;  // "4,3,2" or "m,3,2"
};

/// Parses "4,3,2" or "m,1,1,1". Throws DomainError on malformed input.
ExponentPattern parse_exponents(const std::string& text);

struct GapInstance {
  ExponentPattern exponents;
  Construction construction;
  /// Last exponent of a reduction subproblem; absent for a standalone build.
  std::optional<unsigned> reduction_k;
  /// 1-based index into enumerate_cases(n).
  std::size_t case_id = 1;
  std::size_t case_count = 1;
  /// Strict positivity needed for the equality characterization.
  bool strict_required = false;

  /// "F_{4,3,2} case 1/1".
  std::string label() const;
  /// File-name friendly form of label().
  std::string slug() const;
};

enum class Normalization { none, symbolic_double_factorial };

struct GapPolynomial {
  GapInstance instance;
  MultiPoly poly;
  Normalization normalization = Normalization::none;
};

/// "1" or "2(2m-1)!!".
std::string normalization_text(Normalization n);

/// Constructions in which X_n depends on X_1..X_{n-1}, ordered from the
/// full-rank shape downwards.
std::vector<Construction> enumerate_cases(std::size_t n);

/// moment - prod_k (2m_k-1)!! Lambda_kk^(m_k) over the construction ring.
GapPolynomial build_gap(const ExponentVector& exponents, const Construction& c);

/// F / (2(2m-1)!!) with m = p^2 + 1 for a symbolic first coordinate. The ring
/// is the construction ring extended by p.
GapPolynomial build_gap_symbolic(const ExponentPattern& exponents, const Construction& c);

/// Dispatches on exponents.symbolic and fills the instance fields.
GapPolynomial build_instance(const GapInstance& instance);

struct SubproblemPlan {
  ExponentPattern target;
  std::vector<GapInstance> instances;
  /// Lower-dimensional exponent pattern whose own plan covers k = 0.
  std::optional<ExponentPattern> recursive;
};

/// Every case for every k in 1..m_n, plus the k = 0 reference to the
/// (n-1)-dimensional pattern. n = 2 has no reference.
SubproblemPlan enumerate_subproblems(const ExponentPattern& exponents);

/// Ring and construction for H: X_1 = U_1, X_i = sum_{j<i} x_ij U_j + U_i.
Construction full_construction(std::size_t n);

/// E[U_1^(2m_1) prod_{i>=2} X_i^(2m_i)] - (2m_1-1)!! prod_{i>=2} E[X_i^(2m_i)]
/// over the variables x_ij, i > j.
MultiPoly build_conjecture_H(std::size_t n, const ExponentVector& exponents);

}  // namespace gpisos
