#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gpisos/rational.hpp"

namespace gpisos {

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  BigRational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigRational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_square() const { return rows_ == cols_; }
  bool is_symmetric() const;
  RationalMatrix transpose() const;

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) = default;

  /// x^T A x.
  BigRational quadratic_form(const std::vector<BigRational>& x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigRational> data_;
};

enum class PsdVerdict { psd, indefinite };

struct LdltResult {
  /// perm[i] is the original index placed at position i, so (P^T A P)(i,j) = A(perm[i], perm[j]).
  std::vector<std::size_t> perm;
  RationalMatrix L;
  std::vector<BigRational> d;
  PsdVerdict verdict = PsdVerdict::psd;
  /// False when elimination stopped at a zero diagonal with nonzero
  /// off-diagonal residual; L and d are then only valid up to that step.
  bool complete = true;
};

enum class Pivoting { largest_diagonal, none };

/// Symmetric LDL^T. With Pivoting::largest_diagonal the largest remaining
/// diagonal entry is eliminated first; with Pivoting::none rows are eliminated
/// in their given order (exact for PSD input, where a zero pivot forces a zero
/// row). Throws StructuralError for non-square or non-symmetric input.
LdltResult ldlt(const RationalMatrix& a, Pivoting pivoting = Pivoting::largest_diagonal);

/// P^T A P rebuilt from an ldlt result; used by reconstruction checks.
RationalMatrix permuted(const RationalMatrix& a, const std::vector<std::size_t>& perm);

struct LinearSolution {
  bool consistent = true;
  /// Minimum-Euclidean-norm solution when consistent.
  std::vector<BigRational> x;
  std::size_t rank = 0;
  /// Index of an equation that contradicts the others when inconsistent.
  std::optional<std::size_t> conflicting_row;
};

/// Exact minimum-norm solution of A x = b, or an inconsistency verdict.
LinearSolution solve_linear(const RationalMatrix& a, const std::vector<BigRational>& b);

}  // namespace gpisos
