#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gpisos/polynomial.hpp"
#include "gpisos/rational.hpp"

namespace gpisos {

/// m_1..m_n: coordinate j enters the moment as X_j^(2 m_j).
using ExponentVector = std::vector<unsigned>;

/// Throws DomainError unless every entry is >= 1 and the vector is non-empty.
void check_exponents(const ExponentVector& m);

/// X_k = sum_j rows[k][j] * U_j with independent standard Gaussians U_j.
/// Entries are polynomials (in practice a constant or a single variable)
/// over `ring`.
struct Construction {
  RingPtr ring;
  std::vector<std::vector<MultiPoly>> rows;

  std::size_t dim() const { return rows.size(); }
  /// Row k is U_k alone.
  bool is_pure_row(std::size_t k) const;
  std::string describe() const;
};

/// Builds a construction from an n x n grid of cell texts. A cell is empty or
/// "0" for zero, a rational literal, or a variable name; variables form the
/// ring in row-major order of first appearance.
Construction make_construction(const std::vector<std::vector<std::string>>& cells);

/// Lambda_{kl} = sum_j x_{kj} x_{lj}, entries over the construction ring.
struct CovarianceForm {
  RingPtr ring;
  std::size_t n = 0;
  std::vector<MultiPoly> entries;

  const MultiPoly& operator()(std::size_t k, std::size_t l) const { return entries[k * n + l]; }
};

CovarianceForm covariance(const Construction& c);

/// k!! for odd k >= -1, with (-1)!! = 1.
BigInt double_factorial(long k);

/// E[prod X_j^(2 m_j)] as the scaled coefficient of prod t_j^(2 m_j) in
/// (sum_{k,l} Lambda_kl t_k t_l)^M, M = sum m_j.
MultiPoly moment_by_coefficient(const CovarianceForm& cov, const ExponentVector& m);

/// E[prod X_k^(powers_k)] for arbitrary non-negative powers, by summing over
/// perfect matchings of the factors (zero for an odd factor count). Throws
/// ResourceError when the factor count exceeds `max_factors`.
MultiPoly wick_expectation(const Construction& c, const std::vector<unsigned>& powers,
                           unsigned max_factors = 24);

/// Same moment by summing over perfect matchings of the 2M Gaussian factors.
/// Throws ResourceError when 2M exceeds `max_factors`.
MultiPoly moment_by_wick(const Construction& c, const ExponentVector& m, unsigned max_factors = 24);

/// E[X_1^(2 m_1) ... X_n^(2 m_n)] for a symbolic exponent on coordinate
/// `symbolic` (whose m entry is ignored), divided by (2m-1)!!. The result lives
/// over the construction ring extended by the variable "m". That coordinate's
/// row must be pure.
MultiPoly symbolic_moment(const Construction& c, const ExponentVector& m, std::size_t symbolic);

/// prod_k (2 m_k - 1)!! Lambda_kk^(m_k), the moment under independence.
MultiPoly independent_moment(const CovarianceForm& cov, const ExponentVector& m);

}  // namespace gpisos
