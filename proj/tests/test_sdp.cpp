#include "doctest.h"

#include <random>

#include "gpisos/errors.hpp"
#include "gpisos/sdp.hpp"

using namespace gpisos;
using namespace gpisos::sdp;
using Eigen::MatrixXd;

namespace {

double min_eig(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

MatrixXd dense(const Constraint& c, std::size_t n) {
  MatrixXd a = MatrixXd::Zero(n, n);
  for (const auto& e : c.entries) {
    a(e.row, e.col) += e.value;
    if (e.row != e.col) a(e.col, e.row) += e.value;
  }
  return a;
}

// Random problem with a known PSD feasible point and a trace constraint so
// that the margin stays bounded.
Problem random_problem(std::mt19937_64& rng, MatrixXd& witness) {
  std::uniform_int_distribution<std::size_t> dim_dist(1, 6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = dim_dist(rng);
  MatrixXd f(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f(i, j) = u(rng);
  witness = f * f.transpose();

  Problem p;
  p.dim = n;
  Constraint trace;
  for (std::size_t i = 0; i < n; ++i) trace.entries.push_back({i, i, 1.0});
  trace.rhs = witness.trace();
  p.constraints.push_back(trace);

  std::uniform_int_distribution<std::size_t> count_dist(0, n * (n + 1) / 2 - 1);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  const std::size_t m = count_dist(rng);
  for (std::size_t k = 0; k < m; ++k) {
    Constraint c;
    for (int e = 0; e < 3; ++e) {
      std::size_t r = idx(rng), s = idx(rng);
      if (r > s) std::swap(r, s);
      c.entries.push_back({r, s, u(rng)});
    }
    c.rhs = apply(c, witness);
    p.constraints.push_back(c);
  }
  return p;
}

}  // namespace

TEST_CASE("pinned diagonal problem") {
  Problem p;
  p.dim = 2;
  p.constraints = {{{{0, 0, 1.0}}, 1.0}, {{{1, 1, 1.0}}, 1.0}, {{{0, 1, 1.0}}, 0.0}};
  auto s = solve(p);
  CHECK(s.status == Status::optimal);
  CHECK(s.t == doctest::Approx(1.0).epsilon(1e-8));
  CHECK((s.G - MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("one-by-one problems") {
  Problem p;
  p.dim = 1;
  p.constraints = {{{{0, 0, 1.0}}, 2.0}};
  auto s = solve(p);
  CHECK(s.status == Status::optimal);
  CHECK(s.G(0, 0) == doctest::Approx(2.0));
  CHECK(s.t == doctest::Approx(2.0));

  // Gram system of -x^2 over the basis {x}.
  p.constraints = {{{{0, 0, 1.0}}, -1.0}};
  s = solve(p);
  CHECK(s.status == Status::infeasible);
  CHECK(s.t == doctest::Approx(-1.0));
  REQUIRE(s.moments.size() == 1);
  CHECK(s.moments[0] > 0);
  CHECK(s.moments[0] * -1.0 < 0);
}

TEST_CASE("dependent constraints are dropped and reported") {
  Problem p;
  p.dim = 2;
  p.constraints = {{{{0, 0, 1.0}, {1, 1, 1.0}}, 2.0}, {{{0, 0, 2.0}, {1, 1, 2.0}}, 4.0}, {{{0, 1, 1.0}}, 0.5}};
  auto s = solve(p);
  REQUIRE(s.dropped.size() == 1);
  CHECK(s.dropped[0] == 1);
  CHECK(s.status == Status::optimal);
  CHECK(s.primal_residual < 1e-9);
  // 2 G_01 = 0.5 and tr G = 2 give eigenvalues 1 -+ 0.25.
  CHECK(s.t == doctest::Approx(0.75));
}

TEST_CASE("resource limits and cancellation") {
  Problem p;
  p.dim = 5;
  p.constraints = {{{{0, 0, 1.0}}, 1.0}};
  Options o;
  o.max_dim = 4;
  CHECK_THROWS_AS(solve(p, o), ResourceError);

  std::atomic<bool> cancel{true};
  Options c;
  c.cancel = &cancel;
  p.constraints = {{{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0}, {4, 4, 1.0}}, 5.0}};
  auto s = solve(p, c);
  CHECK(s.status == Status::numerical_failure);
  CHECK(s.message == "cancelled");

  p.constraints = {{{{3, 1, 1.0}}, 1.0}};
  CHECK_THROWS_AS(solve(p), StructuralError);
}

TEST_CASE("property: random feasible problems") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd witness;
    const Problem p = random_problem(rng, witness);
    const auto s = solve(p);
    CAPTURE(trial);
    CAPTURE(s.message);
    REQUIRE((s.status == Status::optimal || s.status == Status::near_optimal));
    CHECK(s.primal_residual <= 1e-7);
    CHECK(min_eig(s.G) >= s.t - 1e-7);
    // The witness is feasible, so the optimum is at least its lambda_min.
    CHECK(s.t >= min_eig(witness) - 1e-6);
    // Dual side: sum l_i A_i PSD with value matching the margin.
    MatrixXd moment = MatrixXd::Zero(p.dim, p.dim);
    double value = 0.0;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      moment += s.moments[i] * dense(p.constraints[i], p.dim);
      value += s.moments[i] * p.constraints[i].rhs;
    }
    CHECK(min_eig(moment) >= -1e-6);
    CHECK(moment.trace() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(value == doctest::Approx(s.t).epsilon(1e-5));
  }
}

TEST_CASE("property: scaling constraints leaves status and argmax unchanged") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd witness;
    const Problem p = random_problem(rng, witness);
    for (double factor : {1e-3, 7.0, 1e3}) {
      Problem q = p;
      for (auto& c : q.constraints) {
        for (auto& e : c.entries) e.value *= factor;
        c.rhs *= factor;
      }
      const auto a = solve(p);
      const auto b = solve(q);
      CAPTURE(trial);
      CAPTURE(factor);
      CHECK(a.status == b.status);
      CHECK(a.t == doctest::Approx(b.t).epsilon(1e-6));
      CHECK((a.G - b.G).lpNorm<Eigen::Infinity>() < 1e-4);
    }
  }
}
