#include "gpisos/soscert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace gpisos {

const char* to_string(CertifyStatus s) {
  switch (s) {
    case CertifyStatus::certified: return "certified";
    case CertifyStatus::refused: return "refused";
    case CertifyStatus::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

bool in_convex_hull(const std::vector<std::vector<long>>& points, const std::vector<long>& point) {
  if (points.empty()) return false;
  const std::size_t d = point.size();
  const std::size_t rows = d + 1;
  const std::size_t ns = points.size();
  const std::size_t cols = ns + rows;  // structural, then artificial

  // Tableau rows: A lambda + a = b with b >= 0 after sign flips.
  std::vector<std::vector<BigRational>> t(rows, std::vector<BigRational>(cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    const long rhs = r < d ? point[r] : 1;
    const int sign = rhs < 0 ? -1 : 1;
    for (std::size_t s = 0; s < ns; ++s) t[r][s] = sign * (r < d ? points[s][r] : 1);
    t[r][ns + r] = 1;
    t[r][cols] = sign * rhs;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = ns + r;

  // Phase-one reduced costs for minimizing the sum of artificials.
  std::vector<BigRational> cost(cols + 1);
  for (std::size_t j = 0; j <= cols; ++j) {
    if (j >= ns && j < cols) continue;
    for (std::size_t r = 0; r < rows; ++r) cost[j] -= t[r][j];
  }

  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = rows;
    BigRational best;
    for (std::size_t r = 0; r < rows; ++r) {
      if (t[r][enter] <= 0) continue;
      const BigRational ratio = t[r][cols] / t[r][enter];
      if (leave == rows || ratio < best || (ratio == best && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == rows) break;  // unbounded cannot happen in phase one
    const BigRational pivot = t[leave][enter];
    for (auto& v : t[leave]) v /= pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave || t[r][enter] == 0) continue;
      const BigRational f = t[r][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[r][j] -= f * t[leave][j];
    }
    const BigRational f = cost[enter];
    for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * t[leave][j];
    basis[leave] = enter;
  }
  return cost[cols] == 0;
}

namespace {

std::vector<long> to_longs(const Monomial& m) {
  std::vector<long> v(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i];
  return v;
}

void enumerate_box(const std::vector<long>& lo, const std::vector<long>& hi, long dlo, long dhi,
                   std::vector<long>& cur, std::size_t i, long deg, std::vector<std::vector<long>>& out) {
  if (deg > dhi) return;
  if (i == lo.size()) {
    if (deg >= dlo) out.push_back(cur);
    return;
  }
  for (long e = lo[i]; e <= hi[i]; ++e) {
    cur[i] = e;
    enumerate_box(lo, hi, dlo, dhi, cur, i + 1, deg + e, out);
  }
}

Monomial from_longs(const std::vector<long>& v) {
  Monomial m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m.set(i, static_cast<Monomial::Exponent>(v[i]));
  return m;
}

void check_parity(const MultiPoly& F) {
  const std::size_t nv = F.ring().size();
  std::vector<long> lo(nv, std::numeric_limits<long>::max()), hi(nv, 0);
  long dlo = std::numeric_limits<long>::max(), dhi = 0;
  for (const auto& [m, c] : F.terms()) {
    for (std::size_t i = 0; i < nv; ++i) {
      lo[i] = std::min<long>(lo[i], m[i]);
      hi[i] = std::max<long>(hi[i], m[i]);
    }
    dlo = std::min<long>(dlo, static_cast<long>(m.degree()));
    dhi = std::max<long>(dhi, static_cast<long>(m.degree()));
  }
  if (dhi % 2) throw NotSosError("total degree " + std::to_string(dhi) + " is odd");
  if (dlo % 2) throw NotSosError("lowest total degree " + std::to_string(dlo) + " is odd");
  for (std::size_t i = 0; i < nv; ++i) {
    if (lo[i] % 2 || hi[i] % 2) {
      throw NotSosError("degree range [" + std::to_string(lo[i]) + ", " + std::to_string(hi[i]) + "] in " +
                        F.ring().name(i) + " has an odd end");
    }
  }
}

}  // namespace

GramBasis select_basis(const MultiPoly& F, const BasisOptions& options) {
  GramBasis basis;
  if (F.is_zero()) return basis;
  check_parity(F);
  const std::size_t nv = F.ring().size();

  std::vector<std::vector<long>> support;
  std::vector<long> lo(nv, std::numeric_limits<long>::max()), hi(nv, 0);
  long dlo = std::numeric_limits<long>::max(), dhi = 0;
  for (const auto& [m, c] : F.terms()) {
    support.push_back(to_longs(m));
    for (std::size_t i = 0; i < nv; ++i) {
      lo[i] = std::min<long>(lo[i], m[i]);
      hi[i] = std::max<long>(hi[i], m[i]);
    }
    dlo = std::min<long>(dlo, static_cast<long>(m.degree()));
    dhi = std::max<long>(dhi, static_cast<long>(m.degree()));
  }

  std::vector<std::vector<long>> candidates;
  std::vector<long> cur(nv);
  if (options.newton) {
    for (std::size_t i = 0; i < nv; ++i) {
      lo[i] /= 2;
      hi[i] /= 2;
    }
    enumerate_box(lo, hi, dlo / 2, dhi / 2, cur, 0, 0, candidates);
    const std::set<std::vector<long>> in_support(support.begin(), support.end());
    std::vector<std::vector<long>> kept;
    for (const auto& u : candidates) {
      std::vector<long> twice(u);
      for (auto& e : twice) e *= 2;
      if (in_support.count(twice) || in_convex_hull(support, twice)) kept.push_back(u);
    }
    candidates = std::move(kept);
  } else {
    enumerate_box(std::vector<long>(nv, 0), std::vector<long>(nv, dhi / 2), 0, dhi / 2, cur, 0, 0, candidates);
  }
  for (const auto& u : candidates) basis.monomials.push_back(from_longs(u));
  std::sort(basis.monomials.begin(), basis.monomials.end());

  if (options.prune_diagonal) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<Monomial, int> offdiag;
      const auto& z = basis.monomials;
      for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) ++offdiag[z[i] * z[j]];
      }
      std::vector<Monomial> next;
      for (const auto& m : z) {
        const Monomial sq = m * m;
        if (F.coefficient(sq) == 0 && !offdiag.count(sq)) {
          changed = true;
        } else {
          next.push_back(m);
        }
      }
      basis.monomials = std::move(next);
    }
  }
  return basis;
}

std::optional<std::size_t> GramSystem::index_of(const Monomial& m) const {
  auto it = std::lower_bound(products.begin(), products.end(), m);
  if (it == products.end() || !(*it == m)) return std::nullopt;
  return static_cast<std::size_t>(it - products.begin());
}

GramSystem build_gram_system(const MultiPoly& F, const GramBasis& z) {
  GramSystem sys;
  sys.ring = F.ring_ptr();
  sys.basis = z;
  std::map<Monomial, std::vector<std::pair<std::size_t, std::size_t>>> groups;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.monomials[i].size() != F.ring().size()) throw StructuralError("basis monomial has the wrong variable count");
    for (std::size_t j = i; j < z.size(); ++j) groups[z.monomials[i] * z.monomials[j]].push_back({i, j});
  }
  for (const auto& [m, c] : F.terms()) {
    if (!groups.count(m)) {
      throw BasisInsufficientError(
          "monomial " + MultiPoly::monomial(F.ring_ptr(), m).to_string() + " is not a product of two basis monomials", m);
    }
  }
  for (auto& [m, list] : groups) {
    sys.products.push_back(m);
    sys.rhs.push_back(F.coefficient(m));
    sys.pairs.push_back(std::move(list));
  }
  return sys;
}

bool satisfies(const GramSystem& sys, const RationalMatrix& g) {
  const std::size_t n = sys.basis.size();
  if (g.rows() != n || g.cols() != n || !g.is_symmetric()) return false;
  for (std::size_t k = 0; k < sys.products.size(); ++k) {
    BigRational s;
    for (const auto& [i, j] : sys.pairs[k]) s += i == j ? g(i, j) : 2 * g(i, j);
    if (s != sys.rhs[k]) return false;
  }
  return true;
}

sdp::Problem to_sdp(const GramSystem& sys, double scale) {
  sdp::Problem p;
  p.dim = sys.basis.size();
  for (std::size_t k = 0; k < sys.products.size(); ++k) {
    sdp::Constraint c;
    for (const auto& [i, j] : sys.pairs[k]) c.entries.push_back({i, j, 1.0});
    c.rhs = sys.rhs[k].get_d() / scale;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

RationalMatrix round_and_project(const Eigen::MatrixXd& g, const GramSystem& sys, const BigInt& denom_bound) {
  const std::size_t n = sys.basis.size();
  if (static_cast<std::size_t>(g.rows()) != n || static_cast<std::size_t>(g.cols()) != n) {
    throw StructuralError("Gram matrix size does not match the basis");
  }
  RationalMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const BigRational q = best_rational(0.5 * (g(i, j) + g(j, i)), denom_bound);
      r(i, j) = q;
      r(j, i) = q;
    }
  }
  for (std::size_t k = 0; k < sys.products.size(); ++k) {
    const auto& group = sys.pairs[k];
    if (group.empty()) {
      if (sys.rhs[k] != 0) throw StructuralError("constraint with no Gram entries has a nonzero right-hand side");
      continue;
    }
    BigRational current, weight;
    for (const auto& [i, j] : group) {
      const int w = i == j ? 1 : 2;
      current += w * r(i, j);
      weight += w;
    }
    if (current == sys.rhs[k]) continue;
    const BigRational shift = (sys.rhs[k] - current) / weight;
    for (const auto& [i, j] : group) {
      r(i, j) += shift;
      if (i != j) r(j, i) = r(i, j);
    }
  }
  return r;
}

SosCertificate extract_sos(const RationalMatrix& g, const GramBasis& z, const RingPtr& ring) {
  const std::size_t n = z.size();
  if (g.rows() != n || g.cols() != n) throw StructuralError("Gram matrix size does not match the basis");
  // Highest monomial first.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = n - 1 - i;
  const RationalMatrix p = permuted(g, order);
  const LdltResult f = ldlt(p, Pivoting::none);
  if (f.verdict != PsdVerdict::psd || !f.complete) throw DomainError("Gram matrix is not positive semidefinite");

  SosCertificate cert;
  cert.basis = z.monomials;
  for (std::size_t k = 0; k < n; ++k) {
    if (f.d[k] == 0) continue;
    MultiPoly fk(ring);
    for (std::size_t i = k; i < n; ++i) {
      if (f.L(i, k) != 0) fk.add_term(z.monomials[order[i]], f.L(i, k));
    }
    cert.terms.push_back({f.d[k], std::move(fk)});
  }
  return cert;
}

namespace {

RationalMatrix moment_matrix(const GramSystem& sys, const std::vector<BigRational>& l) {
  const std::size_t n = sys.basis.size();
  RationalMatrix m(n, n);
  for (std::size_t k = 0; k < sys.products.size(); ++k) {
    for (const auto& [i, j] : sys.pairs[k]) {
      m(i, j) = l[k];
      m(j, i) = l[k];
    }
  }
  return m;
}

// Moments of the uniform measure on [-1,1]^n, scaled to unit trace.
std::vector<BigRational> uniform_moments(const GramSystem& sys) {
  std::vector<BigRational> u(sys.products.size());
  for (std::size_t k = 0; k < sys.products.size(); ++k) {
    BigRational v = 1;
    for (std::size_t i = 0; i < sys.products[k].size(); ++i) {
      const auto e = sys.products[k][i];
      if (e % 2) {
        v = 0;
        break;
      }
      v /= e + 1;
    }
    u[k] = v;
  }
  BigRational trace;
  for (const auto& m : sys.basis.monomials) trace += u[*sys.index_of(m * m)];
  if (trace > 0) {
    for (auto& v : u) v /= trace;
  }
  return u;
}

std::optional<DualCertificate> round_dual(const GramSystem& sys, const std::vector<double>& moments,
                                          const std::vector<BigInt>& bounds) {
  const auto uniform = uniform_moments(sys);
  const std::vector<BigRational> blends{0, BigRational(1, 1000000000), BigRational(1, 10000000), BigRational(1, 100000),
                                        BigRational(1, 1000), BigRational(1, 100), BigRational(1, 10)};
  for (const auto& bound : bounds) {
    std::vector<BigRational> base(moments.size());
    for (std::size_t k = 0; k < moments.size(); ++k) base[k] = best_rational(moments[k], bound);
    for (const auto& delta : blends) {
      DualCertificate d;
      d.moments = base;
      for (std::size_t k = 0; k < base.size(); ++k) d.moments[k] += delta * uniform[k];
      for (std::size_t k = 0; k < base.size(); ++k) d.value += sys.rhs[k] * d.moments[k];
      if (verify_dual(sys, d)) return d;
    }
  }
  return std::nullopt;
}

bool out_of_time(const CertifyOptions& o) {
  if (o.cancel && o.cancel->load()) return true;
  return o.deadline && std::chrono::steady_clock::now() > *o.deadline;
}

}  // namespace

bool verify_dual(const GramSystem& sys, const DualCertificate& dual) {
  if (dual.moments.size() != sys.products.size()) return false;
  BigRational value;
  for (std::size_t k = 0; k < sys.products.size(); ++k) value += sys.rhs[k] * dual.moments[k];
  if (value != dual.value || value >= 0) return false;
  const LdltResult f = ldlt(moment_matrix(sys, dual.moments));
  return f.verdict == PsdVerdict::psd && f.complete;
}

CertifyResult certify(const MultiPoly& F, const CertifyOptions& options) {
  CertifyResult result;
  if (F.is_zero()) {
    result.status = CertifyStatus::certified;
    result.certificate = SosCertificate{};
    result.certificate->provenance = "gpisos sdp pipeline";
    result.certificate->target_fingerprint = fingerprint(F);
    if (options.strictness) result.strictness = StrictnessVerdict{};
    return result;
  }

  GramSystem sys;
  try {
    const GramBasis basis = select_basis(F, options.basis);
    result.basis_size = basis.size();
    if (basis.size() > options.max_basis) {
      result.reason = "basis size " + std::to_string(basis.size()) + " exceeds the cap " + std::to_string(options.max_basis);
      return result;
    }
    sys = build_gram_system(F, basis);
  } catch (const NotSosError& e) {
    result.status = CertifyStatus::refused;
    result.reason = e.what();
    return result;
  } catch (const BasisInsufficientError& e) {
    // The half Newton polytope contains every monomial a square could use.
    result.status = CertifyStatus::refused;
    result.reason = e.what();
    return result;
  }

  double scale = 0.0;
  for (const auto& r : sys.rhs) scale = std::max(scale, std::abs(r.get_d()));
  if (scale == 0.0) scale = 1.0;

  sdp::Options sdp_options = options.sdp;
  if (options.deadline && (!sdp_options.deadline || *options.deadline < *sdp_options.deadline)) {
    sdp_options.deadline = options.deadline;
  }
  if (options.cancel) sdp_options.cancel = options.cancel;

  std::string last_failure = "rounding did not produce a PSD Gram matrix";
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) {
      sdp_options.tol = std::min(sdp_options.tol, 1e-12);
      sdp_options.max_iterations = std::max(sdp_options.max_iterations, 2 * options.sdp.max_iterations);
    }
    sdp::Solution sol;
    try {
      sol = sdp::solve(to_sdp(sys, scale), sdp_options);
    } catch (const ResourceError& e) {
      result.reason = e.what();
      return result;
    }
    result.margin = sol.t * scale;
    result.sdp_iterations += sol.iterations;

    if (sol.t < -sdp_options.infeasibility_margin) {
      if (auto dual = round_dual(sys, sol.moments, options.denominator_bounds)) {
        result.status = CertifyStatus::refused;
        result.dual = std::move(dual);
        result.reason = "SDP dual certificate: no PSD Gram matrix exists over the Newton basis";
        return result;
      }
      last_failure = "negative SDP margin without an exact dual certificate";
      if (sol.status == sdp::Status::infeasible) continue;
    }
    if (out_of_time(options)) {
      result.reason = "time budget exhausted or cancelled";
      return result;
    }

    const Eigen::MatrixXd g = sol.G * scale;
    for (const auto& bound : options.denominator_bounds) {
      if (out_of_time(options)) {
        result.reason = "time budget exhausted or cancelled";
        return result;
      }
      const RationalMatrix r = round_and_project(g, sys, bound);
      SosCertificate cert;
      try {
        cert = extract_sos(r, sys.basis, F.ring_ptr());
      } catch (const DomainError&) {
        continue;
      }
      const VerifyResult v = verify_certificate(cert, F);
      if (!v) throw StructuralError("extracted certificate failed verification: " + v.diagnostic);
      cert.provenance = "gpisos sdp pipeline";
      cert.target_fingerprint = fingerprint(F);
      result.status = CertifyStatus::certified;
      result.denominator_bound = bound;
      result.certificate = std::move(cert);
      result.reason.clear();
      if (options.strictness) result.strictness = check_strictness(*result.certificate, F, options);
      return result;
    }
    if (sol.status == sdp::Status::numerical_failure) last_failure = "SDP solver: " + sol.message;
  }
  result.reason = last_failure;
  return result;
}

StrictnessVerdict check_strictness(const SosCertificate& cert, const MultiPoly& F, const CertifyOptions& options) {
  StrictnessVerdict v;
  if (constant_square(cert)) {
    v.kind = StrictnessVerdict::Kind::strict_constant_square;
    return v;
  }
  if (F.is_zero()) return v;
  CertifyOptions inner = options;
  inner.strictness = false;
  const std::vector<BigRational> origin(F.ring().size());
  const BigRational at_origin = F.evaluate(origin);
  for (BigRational eps = 1; eps >= options.epsilon_floor; eps /= 10) {
    if (out_of_time(options)) break;
    // F - eps is negative at the origin: no shift of this size can work.
    if (at_origin < eps) continue;
    const MultiPoly shifted = F - MultiPoly::constant(F.ring_ptr(), eps);
    const CertifyResult r = certify(shifted, inner);
    if (r.status == CertifyStatus::certified && verify_certificate(*r.certificate, shifted)) {
      v.kind = StrictnessVerdict::Kind::strict_epsilon_shift;
      v.epsilon = eps;
      return v;
    }
  }
  return v;
}

}  // namespace gpisos
