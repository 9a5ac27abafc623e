#include "gpisos/gapbuild.hpp"

#include <sstream>

#include "gpisos/errors.hpp"

namespace gpisos {

std::string ExponentPattern::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ",";
    if (symbolic && *symbolic == i) {
      out << "m";
    } else {
      out << values[i];
    }
  }
  return out.str();
}

ExponentPattern parse_exponents(const std::string& text) {
  ExponentPattern p;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw DomainError("empty entry in exponent list \"" + text + "\"");
    item = item.substr(first, last - first + 1);
    if (item == "m") {
      if (p.symbolic) throw DomainError("at most one symbolic exponent is supported");
      p.symbolic = p.values.size();
      p.values.push_back(0);
      continue;
    }
    if (item.find_first_not_of("0123456789") != std::string::npos || item.size() > 6) {
      throw DomainError("exponent \"" + item + "\" is not a positive integer or m");
    }
    const unsigned v = static_cast<unsigned>(std::stoul(item));
    if (v == 0) throw DomainError("exponents must be positive");
    p.values.push_back(v);
  }
  if (p.values.empty()) throw DomainError("empty exponent list");
  if (p.symbolic && *p.symbolic != 0) throw DomainError("only the first exponent may be symbolic");
  if (p.symbolic && p.values.size() < 2) throw DomainError("a symbolic exponent needs at least two coordinates");
  return p;
}

std::string GapInstance::label() const {
  std::ostringstream out;
  out << "F_{" << exponents.to_string() << "} case " << case_id << "/" << case_count;
  return out.str();
}

std::string GapInstance::slug() const {
  std::string s = "F_" + exponents.to_string();
  for (auto& ch : s) {
    if (ch == ',') ch = '_';
  }
  return s + "_case" + std::to_string(case_id);
}

std::string normalization_text(Normalization n) {
  return n == Normalization::none ? "1" : "2(2m-1)!!";
}

namespace {

std::string free_name(std::size_t index) {
  if (index < 26) return std::string(1, static_cast<char>('a' + index));
  return "v" + std::to_string(index + 1);
}

// Grid builder that hands out free variable names in row-major order.
struct CaseGrid {
  explicit CaseGrid(std::size_t n) : cells(n, std::vector<std::string>(n)) {}

  // Row k (0-based): free entries on U_0..U_{free_count-1}, unit on U_unit.
  void row(std::size_t k, std::size_t free_count, std::size_t unit) {
    for (std::size_t j = 0; j < free_count; ++j) cells[k][j] = free_name(next++);
    cells[k][unit] = "1";
  }

  std::vector<std::vector<std::string>> cells;
  std::size_t next = 0;
};

}  // namespace

std::vector<Construction> enumerate_cases(std::size_t n) {
  if (n < 2) throw DomainError("case enumeration needs n >= 2");
  std::vector<Construction> out;
  if (n == 2) {
    CaseGrid g(2);
    g.cells[0][0] = "1";
    g.cells[1][0] = free_name(g.next++);
    out.push_back(make_construction(g.cells));
    return out;
  }
  // r = dimension spanned by X_1..X_{n-1}. X_n either leaves that span by
  // one new direction ("outside", only when r < n-1) or stays inside it.
  for (std::size_t r = n - 1; r >= 2; --r) {
    for (int variant = 0; variant < 2; ++variant) {
      const bool outside = variant == 0;
      if (outside && r == n - 1) continue;
      CaseGrid g(n);
      g.cells[0][0] = "1";
      for (std::size_t k = 1; k + 1 < n; ++k) {
        if (k < r) {
          g.row(k, k, k);
        } else {
          g.row(k, r - 1, r - 1);
        }
      }
      if (outside) {
        g.row(n - 1, r, r);
      } else {
        g.row(n - 1, r - 1, r - 1);
      }
      out.push_back(make_construction(g.cells));
    }
  }
  return out;
}

GapPolynomial build_gap(const ExponentVector& exponents, const Construction& c) {
  check_exponents(exponents);
  if (exponents.size() != c.dim()) throw StructuralError("exponent vector does not match construction dimension");
  const CovarianceForm cov = covariance(c);
  GapPolynomial g{GapInstance{}, moment_by_coefficient(cov, exponents) - independent_moment(cov, exponents),
                  Normalization::none};
  g.instance.exponents.values = exponents;
  g.instance.construction = c;
  return g;
}

GapPolynomial build_gap_symbolic(const ExponentPattern& exponents, const Construction& c) {
  if (!exponents.symbolic || *exponents.symbolic != 0) {
    throw DomainError("symbolic build needs a symbolic first exponent");
  }
  const std::size_t n = c.dim();
  if (exponents.size() != n) throw StructuralError("exponent vector does not match construction dimension");
  if (c.ring->index_of("p")) throw StructuralError("construction already uses the variable name p");

  // symbolic_moment already divides by (2m-1)!!; Lambda_11 = 1 for a pure row.
  const MultiPoly moment = symbolic_moment(c, exponents.values, 0);
  const CovarianceForm cov = covariance(c);
  MultiPoly product = MultiPoly::constant(c.ring, 1);
  for (std::size_t k = 1; k < n; ++k) {
    product = product * poly_pow(cov(k, k), exponents.values[k]);
    product *= BigRational(double_factorial(2 * static_cast<long>(exponents.values[k]) - 1));
  }
  MultiPoly normalized = moment - change_ring(product, moment.ring_ptr());

  std::vector<std::string> names = c.ring->names();
  names.push_back("p");
  const RingPtr out_ring = make_ring(names);
  const MultiPoly p = MultiPoly::variable(out_ring, "p");
  MultiPoly poly = substitute(normalized, "m", p * p + MultiPoly::constant(out_ring, 1));
  poly *= BigRational(1, 2);

  GapPolynomial g{GapInstance{}, std::move(poly), Normalization::symbolic_double_factorial};
  g.instance.exponents = exponents;
  g.instance.construction = c;
  return g;
}

GapPolynomial build_instance(const GapInstance& instance) {
  GapPolynomial g = instance.exponents.symbolic
                        ? build_gap_symbolic(instance.exponents, instance.construction)
                        : build_gap(instance.exponents.values, instance.construction);
  g.instance = instance;
  return g;
}

SubproblemPlan enumerate_subproblems(const ExponentPattern& exponents) {
  const std::size_t n = exponents.size();
  if (n < 2) throw DomainError("subproblem enumeration needs n >= 2");
  SubproblemPlan plan;
  plan.target = exponents;
  const auto cases = enumerate_cases(n);
  const unsigned last = exponents.values[n - 1];
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    for (unsigned k = 1; k <= last; ++k) {
      GapInstance inst;
      inst.exponents = exponents;
      inst.exponents.values[n - 1] = k;
      inst.construction = cases[ci];
      inst.reduction_k = k;
      inst.case_id = ci + 1;
      inst.case_count = cases.size();
      inst.strict_required = k == last && n >= 3;
      plan.instances.push_back(std::move(inst));
    }
  }
  if (n > 2) {
    ExponentPattern lower = exponents;
    lower.values.pop_back();
    plan.recursive = lower;
  }
  return plan;
}

Construction full_construction(std::size_t n) {
  std::vector<std::vector<std::string>> cells(n, std::vector<std::string>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cells[i][i] = "1";
    for (std::size_t j = 0; j < i; ++j) {
      cells[i][j] = n < 10 ? "x" + std::to_string(i + 1) + std::to_string(j + 1)
                           : "x_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    }
  }
  return make_construction(cells);
}

MultiPoly build_conjecture_H(std::size_t n, const ExponentVector& exponents) {
  if (n < 3) throw DomainError("H is defined for n >= 3");
  check_exponents(exponents);
  if (exponents.size() != n) throw StructuralError("exponent vector length must equal n");
  const Construction c = full_construction(n);
  const CovarianceForm cov = covariance(c);
  const MultiPoly moment = moment_by_coefficient(cov, exponents);

  // E[X_i^(2m_i)] = (2m_i-1)!! (1 + sum_j x_ij^2)^(m_i), taken from the rows.
  MultiPoly product = MultiPoly::constant(c.ring, BigRational(double_factorial(2 * static_cast<long>(exponents[0]) - 1)));
  for (std::size_t i = 1; i < n; ++i) {
    MultiPoly variance(c.ring);
    for (const auto& e : c.rows[i]) variance += e * e;
    product = product * poly_pow(variance, exponents[i]);
    product *= BigRational(double_factorial(2 * static_cast<long>(exponents[i]) - 1));
  }
  return moment - product;
}

}  // namespace gpisos
