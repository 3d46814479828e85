#include "plrd/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "plrd/error.hpp"

namespace plrd {

const char* to_string(KernelType kernel) {
  return kernel == KernelType::Triangular ? "triangular" : "uniform";
}

double kernel_weight(KernelType kernel, double v) {
  v = std::abs(v);
  if (kernel == KernelType::Triangular) return std::max(0.0, 1.0 - v);
  return v <= 1.0 ? 1.0 : 0.0;
}

namespace {

struct SideFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_var = 0.0;
};

SideFit fit_side(const RddSample& sample, bool treated, double h, KernelType kernel) {
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.treated(i) != treated) continue;
    const double w = kernel_weight(kernel, sample.centered(i) / h);
    if (w <= 0.0) continue;
    xs.push_back(sample.centered(i));
    ys.push_back(sample.y()[i]);
    ws.push_back(w);
  }
  const char* side = treated ? "treated" : "control";
  if (xs.size() < 3) {
    throw Error(ErrorCode::EmptyKernelWindow,
                std::string(side) + " side has " + std::to_string(xs.size()) + " observations with positive kernel weight");
  }

  Eigen::Matrix2d xtwx = Eigen::Matrix2d::Zero();
  Eigen::Vector2d xtwy = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Eigen::Vector2d row(1.0, xs[i]);
    xtwx.noalias() += ws[i] * row * row.transpose();
    xtwy.noalias() += ws[i] * ys[i] * row;
  }
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(xtwx);
  if (!lu.isInvertible()) throw Error(ErrorCode::EmptyKernelWindow, std::string(side) + " side design is singular");
  const Eigen::Matrix2d bread = lu.inverse();
  const Eigen::Vector2d beta = bread * xtwy;

  Eigen::Matrix2d meat = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Eigen::Vector2d row(1.0, xs[i]);
    const double e = ys[i] - row.dot(beta);
    meat.noalias() += (ws[i] * ws[i] * e * e) * row * row.transpose();
  }
  SideFit fit;
  fit.intercept = beta(0);
  fit.slope = beta(1);
  fit.intercept_var = (bread * meat * bread)(0, 0);
  return fit;
}

}  // namespace

LlrResult llr(const RddSample& sample, double bandwidth, KernelType kernel, double ci_multiplier) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw Error(ErrorCode::InvalidConfig, "bandwidth must be positive");
  const SideFit control = fit_side(sample, false, bandwidth, kernel);
  const SideFit treated = fit_side(sample, true, bandwidth, kernel);

  LlrResult res;
  res.tau_hat = treated.intercept - control.intercept;
  res.se = std::sqrt(std::max(0.0, control.intercept_var + treated.intercept_var));
  res.bandwidth = bandwidth;
  res.kernel = kernel;
  res.ci_multiplier = ci_multiplier;
  res.intercept = {control.intercept, treated.intercept};
  res.slope = {control.slope, treated.slope};
  return res;
}

double rot_bandwidth(const RddSample& sample) {
  std::vector<double> xc(sample.size());
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    xc[i] = sample.centered(i);
    (sample.treated(i) ? hi : lo).push_back(std::abs(xc[i]));
  }
  const double n = static_cast<double>(sample.size());
  double h = 1.06 * sample_sd(xc) * std::pow(n, -0.2);

  // The k-th nearest distance on each side must fall strictly inside.
  for (auto* side : {&lo, &hi}) {
    if (side->size() < kMinPerSide) continue;
    std::nth_element(side->begin(), side->begin() + (kMinPerSide - 1), side->end());
    const double d = (*side)[kMinPerSide - 1];
    if (!(d < h)) h = std::nextafter(d, INFINITY) * (1.0 + 1e-12);
  }
  return h;
}

}  // namespace plrd
