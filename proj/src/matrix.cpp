#include "gpisos/matrix.hpp"

#include <utility>

#include "gpisos/errors.hpp"

namespace gpisos {

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

bool RationalMatrix::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols_ != b.rows_) throw StructuralError("matrix product dimension mismatch");
  RationalMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const BigRational& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw StructuralError("matrix difference dimension mismatch");
  RationalMatrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
  return c;
}

BigRational RationalMatrix::quadratic_form(const std::vector<BigRational>& x) const {
  if (!is_square() || x.size() != rows_) throw StructuralError("quadratic form dimension mismatch");
  BigRational total = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (x[i] == 0) continue;
    BigRational row = 0;
    for (std::size_t j = 0; j < cols_; ++j) row += (*this)(i, j) * x[j];
    total += x[i] * row;
  }
  return total;
}

RationalMatrix permuted(const RationalMatrix& a, const std::vector<std::size_t>& perm) {
  RationalMatrix p(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < perm.size(); ++j) p(i, j) = a(perm[i], perm[j]);
  }
  return p;
}

LdltResult ldlt(const RationalMatrix& a, Pivoting pivoting) {
  if (!a.is_square()) throw StructuralError("ldlt requires a square matrix");
  if (!a.is_symmetric()) throw StructuralError("ldlt requires a symmetric matrix");
  const std::size_t n = a.rows();
  LdltResult r;
  r.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.perm[i] = i;
  r.L = RationalMatrix::identity(n);
  r.d.assign(n, 0);

  // s holds the trailing Schur complement in positions [k, n).
  RationalMatrix s = a;
  BigRational tmp;
  for (std::size_t k = 0; k < n; ++k) {
    if (pivoting == Pivoting::none) {
      if (s(k, k) < 0) r.verdict = PsdVerdict::indefinite;
      if (s(k, k) == 0) {
        bool offdiag = false;
        for (std::size_t j = k + 1; j < n && !offdiag; ++j) offdiag = s(k, j) != 0;
        if (offdiag) {
          r.verdict = PsdVerdict::indefinite;
          r.complete = false;
          break;
        }
        continue;
      }
    }
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n && pivoting == Pivoting::largest_diagonal; ++i) {
      if (s(i, i) > s(best, best)) best = i;
    }
    if (pivoting == Pivoting::largest_diagonal && s(best, best) <= 0) {
      bool offdiag = false;
      bool negative = false;
      std::size_t most_negative = k;
      for (std::size_t i = k; i < n; ++i) {
        if (s(i, i) < 0) {
          negative = true;
          if (s(i, i) < s(most_negative, most_negative)) most_negative = i;
        }
        for (std::size_t j = k; j < i && !offdiag; ++j) offdiag = s(i, j) != 0;
      }
      if (!negative && !offdiag) break;  // remaining block is zero
      r.verdict = PsdVerdict::indefinite;
      if (!negative) {
        r.complete = false;
        break;
      }
      best = most_negative;
    }
    if (best != k) {
      std::swap(r.perm[k], r.perm[best]);
      for (std::size_t j = 0; j < n; ++j) std::swap(s(k, j), s(best, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(s(i, k), s(i, best));
      for (std::size_t j = 0; j < k; ++j) std::swap(r.L(k, j), r.L(best, j));
    }
    const BigRational pivot = s(k, k);
    r.d[k] = pivot;
    for (std::size_t i = k + 1; i < n; ++i) r.L(i, k) = s(i, k) / pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const BigRational& lik = r.L(i, k);
      if (lik == 0) continue;
      for (std::size_t j = k + 1; j <= i; ++j) {
        mpq_mul(tmp.get_mpq_t(), lik.get_mpq_t(), s(k, j).get_mpq_t());
        s(i, j) -= tmp;
        if (j != i) s(j, i) = s(i, j);
      }
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      s(i, k) = 0;
      s(k, i) = 0;
    }
  }
  return r;
}

LinearSolution solve_linear(const RationalMatrix& a, const std::vector<BigRational>& b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw StructuralError("solve_linear: right-hand side length mismatch");

  // Reduced row echelon form of [A | b].
  RationalMatrix e(m, n + 1);
  std::vector<std::size_t> origin(m);
  for (std::size_t i = 0; i < m; ++i) {
    origin[i] = i;
    for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
    e(i, n) = b[i];
  }
  std::size_t rank = 0;
  BigRational tmp;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    while (piv < m && e(piv, col) == 0) ++piv;
    if (piv == m) continue;
    if (piv != rank) {
      for (std::size_t j = 0; j <= n; ++j) std::swap(e(piv, j), e(rank, j));
      std::swap(origin[piv], origin[rank]);
    }
    const BigRational inv = 1 / e(rank, col);
    for (std::size_t j = col; j <= n; ++j) e(rank, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == rank || e(i, col) == 0) continue;
      const BigRational f = e(i, col);
      for (std::size_t j = col; j <= n; ++j) {
        if (e(rank, j) == 0) continue;
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), e(rank, j).get_mpq_t());
        e(i, j) -= tmp;
      }
    }
    ++rank;
  }

  LinearSolution out;
  out.rank = rank;
  for (std::size_t i = rank; i < m; ++i) {
    if (e(i, n) != 0) {
      out.consistent = false;
      out.conflicting_row = origin[i];
      return out;
    }
  }

  // Minimum-norm solution lies in the row space: x = E^T y with (E E^T) y = c.
  RationalMatrix gram(rank, rank);
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      BigRational s = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (e(i, k) != 0 && e(j, k) != 0) s += e(i, k) * e(j, k);
      }
      gram(i, j) = s;
      gram(j, i) = s;
    }
  }
  std::vector<BigRational> y(rank);
  for (std::size_t i = 0; i < rank; ++i) y[i] = e(i, n);
  // Gram matrix of independent rows is positive definite: plain elimination.
  for (std::size_t k = 0; k < rank; ++k) {
    for (std::size_t i = k + 1; i < rank; ++i) {
      if (gram(i, k) == 0) continue;
      const BigRational f = gram(i, k) / gram(k, k);
      for (std::size_t j = k; j < rank; ++j) gram(i, j) -= f * gram(k, j);
      y[i] -= f * y[k];
    }
  }
  for (std::size_t k = rank; k-- > 0;) {
    for (std::size_t j = k + 1; j < rank; ++j) y[k] -= gram(k, j) * y[j];
    y[k] /= gram(k, k);
  }
  out.x.assign(n, 0);
  for (std::size_t i = 0; i < rank; ++i) {
    if (y[i] == 0) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (e(i, k) != 0) out.x[k] += e(i, k) * y[i];
    }
  }
  return out;
}

}  // namespace gpisos
