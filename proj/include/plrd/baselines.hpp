#pragma once

#include <array>

#include "plrd/sample.hpp"

namespace plrd {

enum class KernelType { Triangular, Uniform };

const char* to_string(KernelType kernel);

inline constexpr double kConventionalMultiplier = 1.96;
/// Critical-value inflation for the plain local-linear interval.
inline constexpr double kInflatedMultiplier = 2.181;

struct LlrResult {
  double tau_hat = 0.0;
  double se = 0.0;
  double bandwidth = 0.0;
  KernelType kernel = KernelType::Triangular;
  double ci_multiplier = kConventionalMultiplier;
  /// Intercept and slope of the control (0) and treated (1) side fits.
  std::array<double, 2> intercept{};
  std::array<double, 2> slope{};

  double half_width() const { return ci_multiplier * se; }
  std::array<double, 2> interval() const { return {tau_hat - half_width(), tau_hat + half_width()}; }
};

/// Kernel weight K(|x~| / h): triangular max(0, 1 - v), uniform 1{v <= 1}.
double kernel_weight(KernelType kernel, double v);

/// Local linear regression on each side of the cutoff with weights
/// K(|x - c| / h); tau_hat is the difference of intercepts. The standard
/// error sums the per-side HC0 sandwich variances of the intercepts.
/// Throws EmptyKernelWindow when a side has fewer than 3 positively weighted
/// observations or a degenerate weighted design.
LlrResult llr(const RddSample& sample, double bandwidth, KernelType kernel = KernelType::Triangular,
              double ci_multiplier = kConventionalMultiplier);

/// h = 1.06 SD[x - c] n^(-1/5), enlarged if needed so that at least 5
/// observations per side lie strictly inside (-h, h).
double rot_bandwidth(const RddSample& sample);

}  // namespace plrd
