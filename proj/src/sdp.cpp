#include "gpisos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gpisos/errors.hpp"

namespace gpisos::sdp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::infeasible: return "infeasible";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

double apply(const Constraint& c, const Eigen::MatrixXd& g) {
  double s = 0.0;
  for (const auto& e : c.entries) s += e.value * (e.row == e.col ? g(e.row, e.col) : 2.0 * g(e.row, e.col));
  return s;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// A = sum_e w_e (E_pq + E_qp), so a diagonal entry carries half its value.
struct Term {
  std::size_t p, q;
  double w;
};

struct Op {
  std::size_t n = 0;
  std::vector<std::vector<Term>> rows;
  VectorXd b;
  VectorXd trace;

  std::size_t m() const { return rows.size(); }

  VectorXd apply(const MatrixXd& x) const {
    VectorXd out(m());
    for (std::size_t i = 0; i < m(); ++i) {
      double s = 0.0;
      for (const auto& t : rows[i]) s += t.w * (x(t.p, t.q) + x(t.q, t.p));
      out[i] = s;
    }
    return out;
  }

  MatrixXd adjoint(const VectorXd& y) const {
    MatrixXd out = MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < m(); ++i) {
      for (const auto& t : rows[i]) {
        out(t.p, t.q) += y[i] * t.w;
        out(t.q, t.p) += y[i] * t.w;
      }
    }
    return out;
  }

  // K_ij = <A_i, A_j> (Frobenius).
  MatrixXd gram() const {
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, double>>> by_entry;
    for (std::size_t i = 0; i < m(); ++i) {
      for (const auto& t : rows[i]) by_entry[{t.p, t.q}].push_back({i, t.w});
    }
    MatrixXd k = MatrixXd::Zero(m(), m());
    for (const auto& [key, list] : by_entry) {
      // Diagonal entry value is 2w; off-diagonal pair contributes twice w*w.
      const double f = key.first == key.second ? 4.0 : 2.0;
      for (const auto& [i, wi] : list) {
        for (const auto& [j, wj] : list) k(i, j) += f * wi * wj;
      }
    }
    return k;
  }

  // M_ij = <A_i, X A_j W>.
  MatrixXd schur(const MatrixXd& x, const MatrixXd& w) const {
    MatrixXd out(m(), m());
    for (std::size_t i = 0; i < m(); ++i) {
      for (std::size_t j = i; j < m(); ++j) {
        double s = 0.0;
        for (const auto& e : rows[i]) {
          const std::size_t p = e.p, q = e.q;
          for (const auto& f : rows[j]) {
            const std::size_t r = f.p, t = f.q;
            s += e.w * f.w * (x(p, r) * w(t, q) + x(p, t) * w(r, q) + x(q, r) * w(t, p) + x(q, t) * w(r, p));
          }
        }
        out(i, j) = s;
        out(j, i) = s;
      }
    }
    return out;
  }
};

MatrixXd sym(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// Largest alpha with x + alpha dx PSD (infinity if unbounded).
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatrixXd l = llt.matrixL();
  MatrixXd z = l.triangularView<Eigen::Lower>().solve(dx);
  z = l.triangularView<Eigen::Lower>().solve(z.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(z), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step_scalar(double x, double dx) {
  return dx >= 0 ? std::numeric_limits<double>::infinity() : -x / dx;
}

double lambda_min(const MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool disjoint_supports(const Problem& problem) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> owner;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    for (const auto& e : problem.constraints[i].entries) {
      auto [it, inserted] = owner.emplace(std::make_pair(e.row, e.col), i);
      if (!inserted && it->second != i) return false;
    }
  }
  return true;
}

std::vector<Term> normalize(const Constraint& c, std::size_t n) {
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  for (const auto& e : c.entries) {
    if (e.row > e.col || e.col >= n) throw StructuralError("constraint entry outside the upper triangle");
    acc[{e.row, e.col}] += e.row == e.col ? 0.5 * e.value : e.value;
  }
  std::vector<Term> out;
  for (const auto& [key, w] : acc) {
    if (w != 0.0) out.push_back({key.first, key.second, w});
  }
  return out;
}

// Indices of a maximal independent subset, in original order.
std::vector<std::size_t> independent_rows(const Problem& problem, std::vector<std::size_t>& dropped) {
  const std::size_t m = problem.constraints.size();
  std::vector<std::size_t> keep;
  std::vector<std::vector<Term>> terms(m);
  for (std::size_t i = 0; i < m; ++i) terms[i] = normalize(problem.constraints[i], problem.dim);
  if (disjoint_supports(problem)) {
    for (std::size_t i = 0; i < m; ++i) {
      if (terms[i].empty()) {
        dropped.push_back(i);
      } else {
        keep.push_back(i);
      }
    }
    return keep;
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> column;
  for (const auto& row : terms) {
    for (const auto& t : row) column.emplace(std::make_pair(t.p, t.q), column.size());
  }
  MatrixXd v = MatrixXd::Zero(static_cast<Eigen::Index>(column.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& t : terms[i]) {
      v(column[{t.p, t.q}], i) = t.p == t.q ? 2.0 * t.w : std::sqrt(2.0) * t.w;
    }
  }
  // Greedy in original order so that earlier constraints are preferred.
  MatrixXd basis(v.rows(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    MatrixXd trial(v.rows(), basis.cols() + 1);
    trial << basis, v.col(static_cast<Eigen::Index>(i));
    Eigen::ColPivHouseholderQR<MatrixXd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.cols()) {
      basis = trial;
      keep.push_back(i);
    } else {
      dropped.push_back(i);
    }
  }
  return keep;
}

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  const std::size_t n = problem.dim;
  if (n > options.max_dim) {
    throw ResourceError("SDP dimension " + std::to_string(n) + " exceeds the cap " + std::to_string(options.max_dim));
  }
  if (n == 0) throw StructuralError("SDP dimension must be positive");

  Solution sol;
  const std::vector<std::size_t> keep = independent_rows(problem, sol.dropped);

  Op op;
  op.n = n;
  op.b.resize(static_cast<Eigen::Index>(keep.size()));
  op.trace = VectorXd::Zero(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    op.rows.push_back(normalize(problem.constraints[keep[k]], n));
    op.b[k] = problem.constraints[keep[k]].rhs;
    for (const auto& t : op.rows.back()) {
      if (t.p == t.q) op.trace[k] += 2.0 * t.w;
    }
  }
  const std::size_t m = op.m();

  // Least-squares projection onto {A(G) = b}.
  MatrixXd k_mat = op.gram();
  Eigen::LDLT<MatrixXd> k_ldlt(k_mat);
  auto project = [&](const MatrixXd& g) -> MatrixXd {
    if (m == 0) return g;
    const VectorXd r = op.apply(g) - op.b;
    return g - op.adjoint(k_ldlt.solve(r));
  };

  // G = X + (x_t + t_low) I with X PSD and x_t >= 0; t_low keeps x_t > 0 at
  // the optimum because the least-norm solution G0 attains lambda_min(G0).
  const MatrixXd g0 = project(MatrixXd::Zero(n, n));
  const double t_low = lambda_min(g0) - 1.0;
  const VectorXd bt = op.b - t_low * op.trace;

  double norm_a = 0.0;
  for (const auto& row : op.rows) {
    double s = 0.0;
    for (const auto& t : row) s += (t.p == t.q ? 4.0 : 2.0) * t.w * t.w;
    norm_a = std::max(norm_a, std::sqrt(s));
  }
  double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
  for (std::size_t i = 0; i < m; ++i) {
    double ai = 0.0;
    for (const auto& t : op.rows[i]) ai += (t.p == t.q ? 4.0 : 2.0) * t.w * t.w;
    xi = std::max(xi, static_cast<double>(n) * (1.0 + std::abs(bt[i])) / (1.0 + std::sqrt(ai)));
  }
  const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), norm_a});

  MatrixXd x = xi * MatrixXd::Identity(n, n);
  MatrixXd s = eta * MatrixXd::Identity(n, n);
  double xt = xi, st = eta;
  VectorXd y = VectorXd::Zero(static_cast<Eigen::Index>(m));
  const double nu = static_cast<double>(n + 1);
  const double bnorm = 1.0 + (m ? bt.lpNorm<Eigen::Infinity>() : 0.0);

  double relp = 0, reld = 0, gap = 0;
  bool converged = false, near = false;
  sol.message = "iteration limit reached";

  for (int it = 0;; ++it) {
    sol.iterations = it;
    const VectorXd rp = bt - op.apply(x) - xt * op.trace;
    const MatrixXd rd = -op.adjoint(y) - s;
    const double rdt = -1.0 - op.trace.dot(y) - st;
    const double pobj = -xt;
    const double dobj = m ? bt.dot(y) : 0.0;
    const double complementarity = (x.cwiseProduct(s)).sum() + xt * st;
    const double mu = complementarity / nu;

    relp = (m ? rp.lpNorm<Eigen::Infinity>() : 0.0) / bnorm;
    reld = std::max(rd.lpNorm<Eigen::Infinity>(), std::abs(rdt)) / (1.0 + norm_a);
    gap = std::abs(complementarity) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (relp <= options.tol && reld <= options.tol && gap <= options.tol) {
      converged = true;
      sol.message = "converged";
      break;
    }
    if (xt > 1e10) {
      sol.message = "margin unbounded";
      break;
    }
    if (it >= options.max_iterations) break;
    if (options.cancel && options.cancel->load()) {
      sol.message = "cancelled";
      break;
    }
    if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
      sol.message = "deadline exceeded";
      break;
    }

    Eigen::LLT<MatrixXd> s_llt(s);
    if (s_llt.info() != Eigen::Success) {
      sol.message = "dual slack lost definiteness";
      break;
    }
    const MatrixXd w = s_llt.solve(MatrixXd::Identity(n, n));
    MatrixXd schur = op.schur(x, w) + (xt / st) * op.trace * op.trace.transpose();
    const double diag_scale = m ? schur.diagonal().cwiseAbs().maxCoeff() : 1.0;
    Eigen::LLT<MatrixXd> m_llt(schur);
    if (m_llt.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-14 * std::max(diag_scale, 1.0);
      m_llt.compute(schur);
      if (m_llt.info() != Eigen::Success) {
        sol.message = "Schur complement not positive definite";
        break;
      }
    }
    const MatrixXd xrdw = x * rd * w;

    // Direction for centering sigma with second-order correction (dxa, dsa).
    struct Dir {
      MatrixXd dx, ds;
      double dxt, dst;
      VectorXd dy;
    };
    auto direction = [&](double sigma, const MatrixXd* dxa, const MatrixXd* dsa, double dxta, double dsta) {
      MatrixXd tmat = -x + sigma * mu * w - xrdw;
      double tau = -xt + sigma * mu / st - xt * rdt / st;
      if (dxa) {
        tmat -= (*dxa) * (*dsa) * w;
        tau -= dxta * dsta / st;
      }
      const VectorXd rhs = rp - op.apply(tmat) - tau * op.trace;
      Dir d;
      d.dy = m ? VectorXd(m_llt.solve(rhs)) : VectorXd();
      d.ds = rd - op.adjoint(d.dy);
      d.dst = rdt - (m ? op.trace.dot(d.dy) : 0.0);
      MatrixXd full = -x + sigma * mu * w - x * d.ds * w;
      if (dxa) full -= (*dxa) * (*dsa) * w;
      d.dx = sym(full);
      d.dxt = -xt + sigma * mu / st - xt * d.dst / st;
      if (dxa) d.dxt -= dxta * dsta / st;
      return d;
    };
    auto steps = [&](const Dir& d) {
      double ap = std::min(max_step(x, d.dx), max_step_scalar(xt, d.dxt));
      double ad = std::min(max_step(s, d.ds), max_step_scalar(st, d.dst));
      return std::make_pair(ap, ad);
    };

    const Dir pred = direction(0.0, nullptr, nullptr, 0, 0);
    auto [ap, ad] = steps(pred);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    const double mu_aff = ((x + ap * pred.dx).cwiseProduct(s + ad * pred.ds).sum() +
                           (xt + ap * pred.dxt) * (st + ad * pred.dst)) / nu;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Dir corr = direction(sigma, &pred.dx, &pred.ds, pred.dxt, pred.dst);
    auto [cp, cd] = steps(corr);
    cp = std::min(1.0, options.step_fraction * cp);
    cd = std::min(1.0, options.step_fraction * cd);
    if (cp < 1e-12 && cd < 1e-12) {
      sol.message = "step length collapsed";
      break;
    }

    x = sym(x + cp * corr.dx);
    xt += cp * corr.dxt;
    s = sym(s + cd * corr.ds);
    st += cd * corr.dst;
    if (m) y += cd * corr.dy;
  }

  near = relp <= options.near_tol && reld <= options.near_tol && gap <= options.near_tol;

  MatrixXd g = x + (xt + t_low) * MatrixXd::Identity(n, n);
  g = project(sym(g));
  sol.G = g;
  sol.t = std::min(xt + t_low, lambda_min(g));
  sol.duality_gap = gap;
  double res = 0.0;
  for (const auto& c : problem.constraints) res = std::max(res, std::abs(apply(c, g) - c.rhs));
  sol.primal_residual = res;

  sol.moments.assign(problem.constraints.size(), 0.0);
  for (std::size_t k = 0; k < keep.size(); ++k) sol.moments[keep[k]] = -y[static_cast<Eigen::Index>(k)];

  if (converged || near) {
    if (sol.t < -options.infeasibility_margin) {
      sol.status = Status::infeasible;
    } else {
      sol.status = converged ? Status::optimal : Status::near_optimal;
    }
  } else {
    sol.status = Status::numerical_failure;
  }
  return sol;
}

}  // namespace gpisos::sdp
