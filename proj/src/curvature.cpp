#include "plrd/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "plrd/polyfit.hpp"

namespace plrd {

const char* to_string(CurvatureBranch branch) {
  return branch == CurvatureBranch::SharedCurvature ? "shared" : "different";
}

double safeguarded_magnitude(double beta3, double se) {
  return std::max(std::abs(beta3 - kSafeguardZ * se), std::abs(beta3 + kSafeguardZ * se));
}

namespace {

void apply_floor(CurvatureEstimate& est, double raw, double epsilon_floor) {
  est.epsilon_used = epsilon_floor > raw;
  est.b_hat = std::max(raw, epsilon_floor);
}

}  // namespace

CurvatureEstimate estimate_b_shared(const RddSample& sample, double epsilon_floor) {
  const LinearFit fit = fit_cubic_shared(sample);
  const double b3 = fit.coefficients(kSharedBeta3);
  const double se = fit.standard_error(kSharedBeta3);

  CurvatureEstimate est;
  est.branch = CurvatureBranch::SharedCurvature;
  est.beta3 = {b3, b3};
  est.beta3_se = {se, se};
  apply_floor(est, safeguarded_magnitude(b3, se), epsilon_floor);
  return est;
}

CurvatureEstimate estimate_b_per_side(const RddSample& sample, double epsilon_floor) {
  const auto [control, treated] = fit_cubic_per_side(sample);

  CurvatureEstimate est;
  est.branch = CurvatureBranch::DifferentCurvature;
  est.beta3 = {control.coefficients(kSideBeta3), treated.coefficients(kSideBeta3)};
  est.beta3_se = {control.standard_error(kSideBeta3), treated.standard_error(kSideBeta3)};
  const double raw = std::max(safeguarded_magnitude(est.beta3[0], est.beta3_se[0]),
                              safeguarded_magnitude(est.beta3[1], est.beta3_se[1]));
  apply_floor(est, raw, epsilon_floor);
  return est;
}

CurvatureEstimate estimate_b(const RddSample& sample, double epsilon_floor, CurvatureBranch branch) {
  return branch == CurvatureBranch::SharedCurvature ? estimate_b_shared(sample, epsilon_floor)
                                                    : estimate_b_per_side(sample, epsilon_floor);
}

}  // namespace plrd
