#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpisos::sdp {

/// A(row, col) = A(col, row) = value, row <= col.
struct SymmetricEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// <A, G> = rhs with A given by its upper-triangle entries.
struct Constraint {
  std::vector<SymmetricEntry> entries;
  double rhs = 0.0;
};

/// maximize t  subject to  <A_i, G> = b_i,  G - t I PSD.
struct Problem {
  std::size_t dim = 0;
  std::vector<Constraint> constraints;
};

struct Options {
  double tol = 1e-9;
  double near_tol = 1e-6;
  int max_iterations = 200;
  double step_fraction = 0.98;
  std::size_t max_dim = 400;
  /// A converged margin below -infeasibility_margin counts as infeasible.
  double infeasibility_margin = 1e-6;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
};

enum class Status { optimal, near_optimal, infeasible, numerical_failure };

const char* to_string(Status s);

struct Solution {
  Eigen::MatrixXd G;
  double t = 0.0;
  double primal_residual = 0.0;
  double duality_gap = 0.0;
  Status status = Status::numerical_failure;
  int iterations = 0;
  /// Dual multipliers as a moment vector l: sum_i l_i A_i is PSD,
  /// sum_i l_i b_i approximates t, and tr(sum_i l_i A_i) approximates 1.
  std::vector<double> moments;
  /// Constraints dropped as linearly dependent on the others.
  std::vector<std::size_t> dropped;
  std::string message;
};

/// Primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector). Throws ResourceError above max_dim and
/// StructuralError for malformed entries.
Solution solve(const Problem& problem, const Options& options = {});

/// <A, G> for one constraint.
double apply(const Constraint& c, const Eigen::MatrixXd& g);

}  // namespace gpisos::sdp
