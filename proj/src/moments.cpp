#include "gpisos/moments.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#include "gpisos/errors.hpp"

namespace gpisos {

void check_exponents(const ExponentVector& m) {
  if (m.empty()) throw DomainError("exponent vector must be non-empty");
  for (auto v : m) {
    if (v < 1) throw DomainError("exponents must be positive");
  }
}

bool Construction::is_pure_row(std::size_t k) const {
  for (std::size_t j = 0; j < rows[k].size(); ++j) {
    const MultiPoly& e = rows[k][j];
    if (j == k) {
      if (!(e.is_constant() && e.coefficient(Monomial(ring->size())) == 1)) return false;
    } else if (!e.is_zero()) {
      return false;
    }
  }
  return true;
}

std::string Construction::describe() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k) out << "; ";
    out << "X" << k + 1 << " =";
    bool first = true;
    for (std::size_t j = 0; j < rows[k].size(); ++j) {
      const MultiPoly& e = rows[k][j];
      if (e.is_zero()) continue;
      out << (first ? " " : " + ");
      first = false;
      if (!(e.is_constant() && e.coefficient(Monomial(ring->size())) == 1)) {
        const bool wrap = e.size() > 1;
        out << (wrap ? "(" : "") << e.to_string() << (wrap ? ")" : "") << "*";
      }
      out << "U" << j + 1;
    }
    if (first) out << " 0";
  }
  return out.str();
}

Construction make_construction(const std::vector<std::vector<std::string>>& cells) {
  const std::size_t n = cells.size();
  std::vector<std::string> names;
  auto is_name = [](const std::string& s) {
    return !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_');
  };
  for (const auto& row : cells) {
    if (row.size() != n) throw StructuralError("construction grid must be square");
    for (const auto& cell : row) {
      if (!is_name(cell)) continue;
      if (std::find(names.begin(), names.end(), cell) != names.end()) {
        throw StructuralError("construction variable " + cell + " appears in more than one cell");
      }
      names.push_back(cell);
    }
  }
  Construction c;
  c.ring = make_ring(names);
  c.rows.assign(n, std::vector<MultiPoly>(n, MultiPoly(c.ring)));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& cell = cells[k][j];
      if (cell.empty()) continue;
      c.rows[k][j] = is_name(cell) ? MultiPoly::variable(c.ring, cell)
                                   : MultiPoly::constant(c.ring, parse_rational(cell));
    }
  }
  return c;
}

CovarianceForm covariance(const Construction& c) {
  CovarianceForm cov;
  cov.ring = c.ring;
  cov.n = c.dim();
  cov.entries.assign(cov.n * cov.n, MultiPoly(c.ring));
  for (std::size_t k = 0; k < cov.n; ++k) {
    if (c.rows[k].size() != cov.n) throw StructuralError("construction rows must have n entries");
    for (std::size_t l = 0; l <= k; ++l) {
      MultiPoly s(c.ring);
      for (std::size_t j = 0; j < cov.n; ++j) {
        if (c.rows[k][j].is_zero() || c.rows[l][j].is_zero()) continue;
        s += c.rows[k][j] * c.rows[l][j];
      }
      cov.entries[k * cov.n + l] = s;
      cov.entries[l * cov.n + k] = s;
    }
  }
  return cov;
}

BigInt double_factorial(long k) {
  if (k < -1 || k % 2 == 0) throw DomainError("double factorial needs an odd argument >= -1");
  BigInt r = 1;
  for (long i = k; i > 1; i -= 2) r *= i;
  return r;
}

namespace {

BigInt factorial(unsigned long k) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), k);
  return r;
}

}  // namespace

MultiPoly moment_by_coefficient(const CovarianceForm& cov, const ExponentVector& m) {
  check_exponents(m);
  if (cov.n != m.size()) throw StructuralError("covariance dimension does not match exponent vector");
  const std::size_t n = cov.n;
  const std::size_t base = cov.ring->size();

  // Ring = construction variables followed by t_1..t_n.
  std::vector<std::string> names = cov.ring->names();
  for (std::size_t j = 0; j < n; ++j) names.push_back("__t" + std::to_string(j + 1));
  const RingPtr ext = make_ring(names);

  MultiPoly quad(ext);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      for (const auto& [mono, c] : cov(k, l).terms()) {
        Monomial e(ext->size());
        for (std::size_t i = 0; i < base; ++i) e.set(i, mono[i]);
        e.set(base + k, e[base + k] + 1);
        e.set(base + l, e[base + l] + 1);
        quad.add_term(e, c);
      }
    }
  }

  const unsigned total = std::accumulate(m.begin(), m.end(), 0U);
  std::vector<std::optional<Monomial::Exponent>> caps(ext->size());
  std::vector<std::size_t> tvars(n);
  std::vector<Monomial::Exponent> texps(n);
  for (std::size_t j = 0; j < n; ++j) {
    caps[base + j] = 2 * m[j];
    tvars[j] = base + j;
    texps[j] = 2 * m[j];
  }
  const MultiPoly power = poly_pow_truncated(quad, total, caps);
  MultiPoly coeff = coefficient_in(power, tvars, texps, cov.ring);

  BigInt num = 1;
  for (auto mj : m) num *= factorial(2 * mj);
  BigInt den = factorial(total);
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), total);
  coeff *= make_rational(num, den);
  return coeff;
}

MultiPoly independent_moment(const CovarianceForm& cov, const ExponentVector& m) {
  check_exponents(m);
  if (cov.n != m.size()) throw StructuralError("covariance dimension does not match exponent vector");
  MultiPoly out = MultiPoly::constant(cov.ring, 1);
  for (std::size_t k = 0; k < cov.n; ++k) {
    out = out * poly_pow(cov(k, k), m[k]);
    out *= BigRational(double_factorial(2 * static_cast<long>(m[k]) - 1));
  }
  return out;
}

namespace {

// Sum over perfect matchings of a multiset of Gaussian factors, with factor
// index k occurring counts[k] times, in the ring of covariance symbols.
class WickExpander {
 public:
  WickExpander(RingPtr ring, std::size_t n) : ring_(std::move(ring)), n_(n) {}

  MultiPoly expand(std::vector<unsigned> counts) {
    auto it = memo_.find(counts);
    if (it != memo_.end()) return it->second;
    std::size_t k = 0;
    while (k < n_ && counts[k] == 0) ++k;
    if (k == n_) return MultiPoly::constant(ring_, 1);
    MultiPoly total(ring_);
    const std::vector<unsigned> key = counts;
    --counts[k];
    for (std::size_t l = k; l < n_; ++l) {
      if (counts[l] == 0) continue;
      const unsigned mult = counts[l];
      --counts[l];
      MultiPoly sub = expand(counts);
      ++counts[l];
      if (sub.is_zero()) continue;
      total += MultiPoly::variable(ring_, symbol(k, l)) * sub * BigRational(mult);
    }
    memo_.emplace(key, total);
    return total;
  }

  static std::string symbol(std::size_t k, std::size_t l) {
    return "L" + std::to_string(k + 1) + "_" + std::to_string(l + 1);
  }

 private:
  RingPtr ring_;
  std::size_t n_;
  std::map<std::vector<unsigned>, MultiPoly> memo_;
};

}  // namespace

MultiPoly wick_expectation(const Construction& c, const std::vector<unsigned>& powers,
                           unsigned max_factors) {
  const std::size_t n = c.dim();
  if (powers.size() != n) throw StructuralError("construction dimension does not match power vector");
  const unsigned factors = std::accumulate(powers.begin(), powers.end(), 0U);
  if (factors > max_factors) {
    throw ResourceError("Wick expansion needs " + std::to_string(factors) + " factors, budget is " +
                        std::to_string(max_factors));
  }
  if (factors % 2 != 0) return MultiPoly(c.ring);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) names.push_back(WickExpander::symbol(k, l));
  }
  const RingPtr sym = make_ring(names);
  WickExpander wick(sym, n);
  const MultiPoly in_symbols = wick.expand(powers);

  // E[X_k X_l] from the rows directly.
  std::vector<MultiPoly> images;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      MultiPoly s(c.ring);
      for (std::size_t j = 0; j < n; ++j) s += c.rows[k][j] * c.rows[l][j];
      images.push_back(s);
    }
  }
  return compose(in_symbols, images, c.ring);
}

MultiPoly moment_by_wick(const Construction& c, const ExponentVector& m, unsigned max_factors) {
  check_exponents(m);
  if (m.size() != c.dim()) throw StructuralError("construction dimension does not match exponent vector");
  std::vector<unsigned> powers(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) powers[k] = 2 * m[k];
  return wick_expectation(c, powers, max_factors);
}

MultiPoly symbolic_moment(const Construction& c, const ExponentVector& m, std::size_t symbolic) {
  const std::size_t n = c.dim();
  if (m.size() != n) throw StructuralError("construction dimension does not match exponent vector");
  if (symbolic >= n) throw StructuralError("symbolic coordinate out of range");
  for (std::size_t k = 0; k < n; ++k) {
    if (k != symbolic && m[k] < 1) throw DomainError("exponents must be positive");
  }
  if (!c.is_pure_row(symbolic)) {
    throw DomainError("symbolic coordinate X" + std::to_string(symbolic + 1) + " is not a pure basis row");
  }
  if (c.ring->index_of("m")) throw StructuralError("construction already uses the variable name m");

  const std::size_t base = c.ring->size();
  std::vector<std::string> names = c.ring->names();
  for (std::size_t j = 0; j < n; ++j) names.push_back("__U" + std::to_string(j + 1));
  const RingPtr ext = make_ring(names);

  // prod over non-symbolic k of X_k^(2 m_k), in construction variables and U.
  MultiPoly product = MultiPoly::constant(ext, 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == symbolic) continue;
    MultiPoly x(ext);
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& [mono, coef] : c.rows[k][j].terms()) {
        Monomial e(ext->size());
        for (std::size_t i = 0; i < base; ++i) e.set(i, mono[i]);
        e.set(base + j, 1);
        x.add_term(e, coef);
      }
    }
    product = product * poly_pow(x, 2 * m[k]);
  }

  std::vector<std::string> out_names = c.ring->names();
  out_names.push_back("m");
  const RingPtr out_ring = make_ring(out_names);
  const MultiPoly mvar = MultiPoly::variable(out_ring, "m");

  // E[U^(2m + 2j)] / (2m - 1)!! = prod_{i=1}^{j} (2m + 2i - 1).
  std::vector<MultiPoly> ratio{MultiPoly::constant(out_ring, 1)};
  auto ratio_at = [&](std::size_t j) -> const MultiPoly& {
    while (ratio.size() <= j) {
      const long i = static_cast<long>(ratio.size());
      ratio.push_back(ratio.back() * (mvar * BigRational(2) + MultiPoly::constant(out_ring, 2 * i - 1)));
    }
    return ratio[j];
  };

  std::map<Monomial::Exponent, MultiPoly> by_symbolic_power;
  for (const auto& [mono, coef] : product.terms()) {
    BigRational value = coef;
    bool vanishes = false;
    for (std::size_t j = 0; j < n && !vanishes; ++j) {
      const auto e = mono[base + j];
      if (e % 2 != 0) {
        vanishes = true;
      } else if (j != symbolic) {
        value *= BigRational(double_factorial(static_cast<long>(e) - 1));
      }
    }
    if (vanishes) continue;
    Monomial rest(out_ring->size());
    for (std::size_t i = 0; i < base; ++i) rest.set(i, mono[i]);
    auto [it, inserted] = by_symbolic_power.try_emplace(mono[base + symbolic], MultiPoly(out_ring));
    it->second.add_term(rest, value);
  }
  MultiPoly out(out_ring);
  for (const auto& [e, poly] : by_symbolic_power) out += poly * ratio_at(e / 2);
  return out;
}

}  // namespace gpisos
