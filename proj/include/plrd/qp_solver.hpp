#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

namespace plrd::qp {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Strictly convex QP with a diagonal Hessian:
///
///   minimize    0.5 x' diag(h) x + g' x
///   subject to  E x  = e
///               C x >= c
///
/// Constraints are stored one per row.
struct Problem {
  Eigen::VectorXd hessian_diag;
  Eigen::VectorXd linear;
  SparseRows eq;
  Eigen::VectorXd eq_rhs;
  SparseRows ineq;
  Eigen::VectorXd ineq_rhs;

  Eigen::Index num_vars() const { return hessian_diag.size(); }
};

enum class Status { Optimal, Infeasible, IterationLimit, Degenerate };

const char* to_string(Status status);

struct Options {
  int max_iterations = 100000;
  /// Slack below which an inequality counts as violated, measured on the
  /// row-normalized constraint.
  double feasibility_tol = 1e-12;
};

/// Multipliers follow the sign convention  H x + g = E' eq_multipliers + C' ineq_multipliers,
/// with ineq_multipliers >= 0.
struct Solution {
  Status status = Status::Degenerate;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;
  std::vector<int> active_ineq;
  int iterations = 0;
};

/// Goldfarb-Idnani dual active-set method. Starts from the unconstrained
/// minimizer and adds violated constraints one at a time, keeping dual
/// feasibility; the factorization J = L^-T Q is updated with Givens rotations.
Solution solve(const Problem& problem, const Options& options = {});

struct KktReport {
  double stationarity = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double complementarity = 0.0;

  double max() const;
};

/// Stationarity is relative to the largest force term (Hx, c, A'lambda), dual
/// infeasibility and complementarity to the largest multiplier; each scale is
/// at least 1. Primal infeasibility is absolute.
KktReport kkt_report(const Problem& problem, const Solution& solution);

}  // namespace plrd::qp
