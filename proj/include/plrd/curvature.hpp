#pragma once

#include <array>

#include "plrd/sample.hpp"

namespace plrd {

enum class CurvatureBranch { SharedCurvature, DifferentCurvature };

const char* to_string(CurvatureBranch branch);

/// Multiplier of the standard-error safeguard, fixed independently of alpha.
inline constexpr double kSafeguardZ = 1.96;

/// Lipschitz bound on the second derivative, estimated from cubic fits.
/// For the shared branch both entries of beta3 / beta3_se hold the pooled
/// estimate; for the different branch index 0 is control, 1 treated.
struct CurvatureEstimate {
  double b_hat = 0.0;
  std::array<double, 2> beta3{};
  std::array<double, 2> beta3_se{};
  CurvatureBranch branch = CurvatureBranch::SharedCurvature;
  bool epsilon_used = false;
};

/// max{|b3 - 1.96 se|, |b3 + 1.96 se|}
double safeguarded_magnitude(double beta3, double se);

CurvatureEstimate estimate_b_shared(const RddSample& sample, double epsilon_floor);
CurvatureEstimate estimate_b_per_side(const RddSample& sample, double epsilon_floor);
CurvatureEstimate estimate_b(const RddSample& sample, double epsilon_floor, CurvatureBranch branch);

}  // namespace plrd
