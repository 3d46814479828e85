#pragma once

#include <Eigen/Dense>
#include <utility>

#include "plrd/sample.hpp"

namespace plrd {

/// Result of an ordinary least-squares fit.
struct LinearFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // sigma2_hat * (X'X)^-1
  Eigen::VectorXd residuals;
  int dof = 0;                 // n - p
  double rss = 0.0;
  double sigma2_hat = 0.0;     // rss / dof

  double standard_error(Eigen::Index j) const { return std::sqrt(covariance(j, j)); }
};

/// Least squares via column-pivoted Householder QR. A pivot below
/// 1e-10 * (largest pivot) counts as rank deficiency (Error RankDeficient).
/// Needs at least one residual degree of freedom.
LinearFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

// Design matrices on centred running variable x~ = x - c. Column order puts
// the control coefficient before the treated one for each term.

/// {1-W, W, (1-W)x~, W x~}
Eigen::MatrixXd interacted_linear_design(const RddSample& sample);
/// {1-W, W, (1-W)x~, W x~, x~^2/2, x~^3/6}; beta_3 is column 5.
Eigen::MatrixXd cubic_shared_design(const RddSample& sample);
/// {1-W, W, (1-W)x~, W x~, (1-W)x~^2/2, W x~^2/2, (1-W)x~^3/6, W x~^3/6}
Eigen::MatrixXd cubic_interacted_design(const RddSample& sample);

/// Outcome regressed on the interaction of x~ and W. Residuals follow sample order.
LinearFit fit_interacted_linear(const RddSample& sample);

/// Pooled-curvature cubic. Coefficients (b00, b10, b01, b11, b2, b3).
LinearFit fit_cubic_shared(const RddSample& sample);

inline constexpr Eigen::Index kSharedBeta3 = 5;
inline constexpr Eigen::Index kSideBeta3 = 3;

/// Separate cubics {1, x~, x~^2/2, x~^3/6} on the control (first) and treated
/// (second) sides.
std::pair<LinearFit, LinearFit> fit_cubic_per_side(const RddSample& sample);

struct AnovaResult {
  double f_stat = 0.0;
  int df1 = 2;
  int df2 = 0;
  double p_value = 1.0;
  bool reject = false;
  double rss_restricted = 0.0;
  double rss_unrestricted = 0.0;
};

/// Nested F-test: shared-curvature cubic (6 parameters) against the fully
/// interacted cubic (8 parameters). Rejects when p < alpha_prime.
AnovaResult anova_curvature_test(const RddSample& sample, double alpha_prime);

}  // namespace plrd
