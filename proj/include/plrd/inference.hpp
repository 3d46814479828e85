#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "plrd/curvature.hpp"
#include "plrd/minimax.hpp"
#include "plrd/polyfit.hpp"
#include "plrd/sample.hpp"

namespace plrd {

/// Seeded split into folds of sizes ceil(n/2) and floor(n/2). Both index
/// lists are returned in ascending order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_folds(std::size_t n, std::uint64_t seed);

/// Smallest h with P(|b + s Z| <= h) >= 1 - alpha for every |b| <= b_bound.
/// The probability falls in |b|, so h solves
///   Phi((h - b)/s) - Phi((-h - b)/s) = 1 - alpha   at b = b_bound.
/// Throws InvalidAlpha.
double imbens_manski_halfwidth(double b_bound, double s, double alpha);

/// sqrt(sum gamma_i^2 r_i^2)
double robust_se(std::span<const double> gamma, std::span<const double> residuals);

/// max |gamma| / |gamma|_2 (0 for the zero vector)
double lindeberg_ratio(std::span<const double> gamma);

/// Per-fold diagnostics of the weight solve.
struct FoldDiagnostics {
  std::size_t size = 0;
  double sigma2_hat = 0.0;           // from this fold's interacted-linear fit
  CurvatureEstimate curvature;       // B on the scaled axis
  double b_hat_used = 0.0;           // curvature bound passed to the other fold's solve
  double sigma2_used = 0.0;
  double t_hat_scaled = 0.0;         // solve on this fold, with the other fold's nuisances
  double objective = 0.0;
  double max_equality_residual = 0.0;
  double kkt_residual = 0.0;
  double certificate_mismatch = 0.0;
  int iterations = 0;
};

struct PlrdResult {
  double tau_hat = 0.0;
  double b_bound = 0.0;
  double se_robust = 0.0;
  double half_width = 0.0;
  std::array<double, 2> interval{};
  CurvatureBranch branch = CurvatureBranch::SharedCurvature;
  /// Curvature bounds and bias scales of fold 1 and 2 in original x units;
  /// b_bound = (b_hat_folds[1] t_hat_folds[0] + b_hat_folds[0] t_hat_folds[1]) / 2.
  std::array<double, 2> b_hat_folds{};
  std::array<double, 2> t_hat_folds{};
  double lindeberg_ratio = 0.0;
  std::size_t n_used = 0;
  std::size_t n_total = 0;

  double alpha = 0.05;
  double epsilon_floor = 0.0;
  double kappa = 1.0;
  AnovaResult anova;
  std::array<FoldDiagnostics, 2> folds;
  /// One weight per input observation, 0 outside the window.
  std::vector<double> gamma;
};

struct EstimateOptions {
  SmoothnessClass order = SmoothnessClass::LipschitzSecondDeriv;
  MinimaxOptions minimax;
  /// Rebuild the weights from the dual certificate and fail on disagreement.
  bool check_certificate = true;
};

/// Runs the full procedure: window, curvature test, split, cross-fitted
/// nuisances, weight solves, combination and the bias-aware interval.
/// Computation happens on the rescaled running variable; reported numbers
/// are in original units.
PlrdResult estimate(const RddSample& sample, const PlrdConfig& config, const EstimateOptions& options = {});

}  // namespace plrd
