#include "plrd/polyfit.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "plrd/error.hpp"
#include "plrd/stats.hpp"

namespace plrd {

LinearFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "design rows and outcome length differ");
  if (n <= p) {
    throw Error(ErrorCode::InsufficientDof,
                "least squares needs more rows (" + std::to_string(n) + ") than columns (" + std::to_string(p) + ")");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    throw Error(ErrorCode::RankDeficient,
                "design of " + std::to_string(p) + " columns has numerical rank " + std::to_string(qr.rank()));
  }

  LinearFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - design * fit.coefficients;
  fit.dof = static_cast<int>(n - p);
  fit.rss = fit.residuals.squaredNorm();
  fit.sigma2_hat = fit.rss / fit.dof;

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  fit.covariance = fit.sigma2_hat * (perm * inner * perm.transpose());
  return fit;
}

Eigen::MatrixXd interacted_linear_design(const RddSample& sample) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd design(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = sample.treated(i) ? 1.0 : 0.0;
    const double xc = sample.centered(i);
    design.row(i) << 1.0 - w, w, (1.0 - w) * xc, w * xc;
  }
  return design;
}

Eigen::MatrixXd cubic_shared_design(const RddSample& sample) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd design(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = sample.treated(i) ? 1.0 : 0.0;
    const double xc = sample.centered(i);
    design.row(i) << 1.0 - w, w, (1.0 - w) * xc, w * xc, xc * xc / 2.0, xc * xc * xc / 6.0;
  }
  return design;
}

Eigen::MatrixXd cubic_interacted_design(const RddSample& sample) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd design(n, 8);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = sample.treated(i) ? 1.0 : 0.0;
    const double xc = sample.centered(i);
    const double q = xc * xc / 2.0;
    const double cu = xc * xc * xc / 6.0;
    design.row(i) << 1.0 - w, w, (1.0 - w) * xc, w * xc, (1.0 - w) * q, w * q, (1.0 - w) * cu, w * cu;
  }
  return design;
}

namespace {

Eigen::VectorXd outcome(const RddSample& sample) {
  return Eigen::Map<const Eigen::VectorXd>(sample.y().data(), static_cast<Eigen::Index>(sample.size()));
}

}  // namespace

LinearFit fit_interacted_linear(const RddSample& sample) {
  return ols(interacted_linear_design(sample), outcome(sample));
}

LinearFit fit_cubic_shared(const RddSample& sample) {
  return ols(cubic_shared_design(sample), outcome(sample));
}

std::pair<LinearFit, LinearFit> fit_cubic_per_side(const RddSample& sample) {
  auto side_fit = [&](bool treated_side) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (sample.treated(i) == treated_side) idx.push_back(i);
    }
    if (idx.size() < kMinPerSide) {
      throw Error(ErrorCode::EmptySide, std::string(treated_side ? "treated" : "control") +
                                            " side has fewer than 5 observations for its cubic fit");
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(idx.size()), 4);
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double xc = sample.centered(idx[k]);
      design.row(static_cast<Eigen::Index>(k)) << 1.0, xc, xc * xc / 2.0, xc * xc * xc / 6.0;
      y(static_cast<Eigen::Index>(k)) = sample.y()[idx[k]];
    }
    return ols(design, y);
  };
  return {side_fit(false), side_fit(true)};
}

AnovaResult anova_curvature_test(const RddSample& sample, double alpha_prime) {
  const auto n = static_cast<int>(sample.size());
  if (n <= 8) throw Error(ErrorCode::InsufficientDof, "curvature test needs more than 8 observations");

  const Eigen::VectorXd y = outcome(sample);
  const LinearFit restricted = ols(cubic_shared_design(sample), y);
  const LinearFit unrestricted = ols(cubic_interacted_design(sample), y);

  AnovaResult result;
  result.df1 = 2;
  result.df2 = n - 8;
  result.rss_restricted = restricted.rss;
  result.rss_unrestricted = unrestricted.rss;

  // Residual sums that are pure rounding noise relative to the total sum of
  // squares are treated as exact zeros.
  const double tss = (y.array() - y.mean()).square().sum();
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * tss;
  const double gain = std::max(0.0, restricted.rss - unrestricted.rss);
  if (gain <= noise) {
    result.f_stat = 0.0;
  } else if (unrestricted.rss <= noise) {
    result.f_stat = std::numeric_limits<double>::infinity();
  } else {
    result.f_stat = (gain / result.df1) / (unrestricted.rss / result.df2);
  }
  result.p_value = stats::f_upper_tail(result.f_stat, result.df1, result.df2);
  result.reject = result.p_value < alpha_prime;
  return result;
}

}  // namespace plrd
