#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "plrd/curvature.hpp"
#include "plrd/sample.hpp"

namespace plrd {

/// Smoothness class of the normalized baseline remainder rho.
///  LipschitzSecondDeriv: rho(0) = rho'(0) = rho''(0) = 0, rho'' 1-Lipschitz.
///  LipschitzFirstDeriv:  rho(0) = rho'(0) = 0, rho' 1-Lipschitz (ablation).
enum class SmoothnessClass { LipschitzSecondDeriv, LipschitzFirstDeriv };

const char* to_string(SmoothnessClass order);

struct FunctionClassSpec {
  SmoothnessClass order = SmoothnessClass::LipschitzSecondDeriv;
  CurvatureBranch branch = CurvatureBranch::SharedCurvature;
  /// Knots on the centred running-variable axis; strictly increasing, contains 0.
  std::vector<double> grid;
};

/// Uniform grid of `grid_points` knots over the centred range of `sample`,
/// plus 0. The first-derivative class also gets every observation as a knot.
FunctionClassSpec make_function_class(const RddSample& sample, SmoothnessClass order,
                                      CurvatureBranch branch, int grid_points);

/// Throws InvalidConfig unless the grid is strictly increasing, holds 0 once
/// and has at least 20 knots.
void check_function_class(const FunctionClassSpec& spec);

/// Influence of the remainder's top derivative at u on rho(x):
///   rho(x) = integral k(x, u) rho^{(p+1)}(u) du,
/// with k(x, u) = (x-u)^2/2 on [0, x] and -(x-u)^2/2 on [x, 0] for the
/// second-derivative class, (x-u) and (u-x) for the first-derivative class.
double influence_kernel(SmoothnessClass order, double x, double u);

/// Derivative of influence_kernel in u of the class order (2nd for the
/// second-derivative class, 1st otherwise); piecewise constant in u.
double influence_kernel_top_derivative(SmoothnessClass order, double x, double u);

/// K(u) = sum_i gamma_i k(x~_i, u). The worst-case bias over the class is
/// the integral of |K|. Controls only reach u < 0 and treated units only u > 0,
/// so K restricted to each half is the per-side kernel K_0 / K_1.
class BiasKernel {
 public:
  BiasKernel(std::span<const double> gamma, const RddSample& sample, SmoothnessClass order);

  double operator()(double u) const;
  std::vector<double> on_grid(std::span<const double> grid) const;

 private:
  std::vector<double> gamma_;
  std::vector<double> xc_;
  SmoothnessClass order_;
};

BiasKernel bias_kernel(std::span<const double> gamma, const RddSample& sample, const FunctionClassSpec& spec);

/// Multipliers of the discretized problem written in the dual form
///   gamma_i = -G(x~_i, W_i) / (2 sigma^2),  t = lambda_bias / (2 B^2),
///   G(x, w) = rho~(x) + sum_j lambda_moments[j] * phi_j(x, w),
/// where rho~ is a discrete measure over kernel evaluations and phi_j are the
/// equality-constraint features (see moment_features).
struct DualCertificate {
  SmoothnessClass order = SmoothnessClass::LipschitzSecondDeriv;
  CurvatureBranch branch = CurvatureBranch::SharedCurvature;
  double lambda_bias = 0.0;
  std::vector<double> lambda_moments;
  /// Side of each atom: +1 acts on treated units, -1 on controls (u = 0
  /// belongs to both halves, so the location alone is ambiguous).
  std::vector<double> knot_u;
  std::vector<double> knot_weight;
  std::vector<int> knot_side;
  std::vector<double> piece_v;
  std::vector<double> piece_weight;
  std::vector<int> piece_side;

  double rho_tilde(double x) const;
  double g_function(double x, bool treated) const;
};

/// Equality-constraint features phi_j(x~, w) and their right-hand sides.
/// Shared: w, 1-w, w x, (1-w) x, x^2. Different: ..., w x^2, (1-w) x^2.
/// First-derivative class: the first four only.
std::vector<double> moment_features(SmoothnessClass order, CurvatureBranch branch, double xc, bool treated);
std::vector<double> moment_targets(SmoothnessClass order, CurvatureBranch branch);

struct MinimaxSolution {
  Eigen::VectorXd gamma;
  double t_hat = 0.0;
  /// B^2 t^2 + sigma^2 |gamma|^2
  double objective = 0.0;
  Eigen::VectorXd equality_residuals;
  DualCertificate dual_certificate;
  double kkt_residual = 0.0;
  int iterations = 0;
  FunctionClassSpec spec;
};

struct MinimaxOptions {
  /// Cells grouped under one bound on the kernel's top derivative.
  int remainder_block_cells = 8;
  double aux_regularization = 1e-10;
  double kkt_tolerance = 1e-6;
};

/// Minimizes B^2 t^2 + sigma^2 sum gamma_i^2 over weights annihilating the
/// moment features, subject to (quadrature upper bound of) integral |K| <= t.
/// The quadrature is trapezoidal |K| at the knots plus a remainder bounded by
/// the kernel's top derivative, so t >= exact integral |K|.
/// Errors: Infeasible, SolverStall, NumericalBreakdown, InvalidConfig.
MinimaxSolution solve_minimax(const RddSample& fold, double b_hat, double sigma2_hat,
                              const FunctionClassSpec& spec, const MinimaxOptions& options = {});

/// Exact integral of |K| on a grid refined to `fine_grid` uniform knots plus
/// every observation and 0; K is a polynomial on each cell, integrated
/// piecewise between its roots. Default refinement is 10x the spec grid.
double worst_case_bias_oracle(std::span<const double> gamma, const RddSample& sample,
                              const FunctionClassSpec& spec, int fine_grid = 0);

struct RecoveredPrimal {
  Eigen::VectorXd gamma;
  double t = 0.0;
  double mismatch = 0.0;  // |gamma_rec - gamma|_inf / |gamma|_inf
};

/// Rebuilds (gamma, t) from the certificate alone. Throws CertificateMismatch
/// when the result disagrees with `solver_gamma` beyond `tolerance`.
RecoveredPrimal recover_primal_from_dual(const DualCertificate& certificate, const RddSample& fold,
                                         double sigma2_hat, double b_hat,
                                         const Eigen::VectorXd& solver_gamma, double tolerance = 1e-6);

/// CSV rows `x,w,gamma` sorted by x.
void write_weights_csv(std::ostream& out, std::span<const double> x, std::span<const int> treated,
                       std::span<const double> gamma);

}  // namespace plrd
