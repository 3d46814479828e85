#include "plrd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plrd/error.hpp"
#include "plrd/rng.hpp"
#include "plrd/stats.hpp"

namespace plrd {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_folds(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Engine engine = make_engine(seed);
  std::shuffle(perm.begin(), perm.end(), engine);
  const std::size_t first = (n + 1) / 2;
  std::vector<std::size_t> a(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(first));
  std::vector<std::size_t> b(perm.begin() + static_cast<std::ptrdiff_t>(first), perm.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {std::move(a), std::move(b)};
}

double imbens_manski_halfwidth(double b_bound, double s, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
  if (!(b_bound >= 0.0) || !(s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "bias bound and scale must be >= 0");
  const double z = stats::normal_quantile(1.0 - alpha / 2.0);
  if (s == 0.0) return b_bound;
  if (b_bound == 0.0) return s * z;

  // Non-coverage at the worst bias, written with upper tails to avoid cancellation.
  auto miss = [&](double h) { return stats::normal_sf((h - b_bound) / s) + stats::normal_sf((h + b_bound) / s); };
  double lo = b_bound;
  double hi = b_bound + s * z + 10.0 * s;
  const double tol = 1e-10 * std::max({s, b_bound, 1.0});
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (miss(mid) > alpha ? lo : hi) = mid;
  }
  return hi;
}

double robust_se(std::span<const double> gamma, std::span<const double> residuals) {
  if (gamma.size() != residuals.size()) throw Error(ErrorCode::LengthMismatch, "weights and residuals differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) acc += gamma[i] * gamma[i] * residuals[i] * residuals[i];
  return std::sqrt(acc);
}

double lindeberg_ratio(std::span<const double> gamma) {
  double mx = 0.0;
  double ss = 0.0;
  for (double g : gamma) {
    mx = std::max(mx, std::abs(g));
    ss += g * g;
  }
  return ss > 0.0 ? mx / std::sqrt(ss) : 0.0;
}

namespace {

struct Nuisance {
  double sigma2 = 0.0;
  std::vector<double> residuals;
  CurvatureEstimate curvature;
};

Nuisance fit_nuisance(const RddSample& fold, double epsilon_scaled, CurvatureBranch branch) {
  Nuisance nu;
  const LinearFit lin = fit_interacted_linear(fold);
  nu.sigma2 = lin.sigma2_hat;
  nu.residuals.assign(lin.residuals.data(), lin.residuals.data() + lin.residuals.size());
  if (branch == CurvatureBranch::DifferentCurvature) {
    try {
      nu.curvature = estimate_b_per_side(fold, epsilon_scaled);
    } catch (const Error& e) {
      throw Error(ErrorCode::BranchInfeasible, std::string("per-side cubic fit failed: ") + e.what());
    }
  } else {
    nu.curvature = estimate_b_shared(fold, epsilon_scaled);
  }
  return nu;
}

// The weight problem needs B > 0 and sigma^2 > 0. A nuisance that vanishes
// (noiseless or polynomial data) is floored relative to the other one.
std::pair<double, double> usable_nuisances(double b, double sigma2) {
  constexpr double kRel = 1e-8;
  if (b > 0.0 && sigma2 > 0.0) {
    if (sigma2 < kRel * b * b) return {b, kRel * b * b};
    if (b * b < kRel * sigma2) return {std::sqrt(kRel * sigma2), sigma2};
    return {b, sigma2};
  }
  if (b > 0.0) return {b, kRel * b * b};
  if (sigma2 > 0.0) return {std::sqrt(kRel * sigma2), sigma2};
  return {1.0, 1.0};
}

}  // namespace

PlrdResult estimate(const RddSample& sample, const PlrdConfig& config, const EstimateOptions& options) {
  validate(sample);
  validate_config(config);

  PlrdResult res;
  res.alpha = config.alpha;
  res.n_total = sample.size();
  res.epsilon_floor = config.epsilon_floor.value_or(sample_sd(sample.y()) / 100.0);

  const std::vector<std::size_t> kept = window_indices(sample, config.window_ell);
  const RddSample windowed = apply_window(sample, config.window_ell);
  const ScaledSample scaled = rescale(windowed);
  const RddSample& s = scaled.sample;
  const double kappa = scaled.kappa;
  res.kappa = kappa;
  res.n_used = s.size();
  const double epsilon_scaled = scale_curvature(res.epsilon_floor, kappa);

  res.anova = anova_curvature_test(s, config.anova_alpha_prime);
  res.branch = res.anova.reject ? CurvatureBranch::DifferentCurvature : CurvatureBranch::SharedCurvature;

  const auto [i1, i2] = split_folds(s.size(), config.split_seed);
  const std::array<const std::vector<std::size_t>*, 2> idx{&i1, &i2};
  const std::array<RddSample, 2> folds{s.subset(i1), s.subset(i2)};
  const std::array<Nuisance, 2> nu{fit_nuisance(folds[0], epsilon_scaled, res.branch),
                                   fit_nuisance(folds[1], epsilon_scaled, res.branch)};

  const FunctionClassSpec spec = make_function_class(s, options.order, res.branch, config.grid_points);

  std::vector<double> gamma_window(s.size(), 0.0);
  std::vector<double> resid_window(s.size(), 0.0);
  for (int k = 0; k < 2; ++k) {
    const int other = 1 - k;
    const auto [b_use, s2_use] = usable_nuisances(nu[other].curvature.b_hat, nu[other].sigma2);
    const MinimaxSolution sol = solve_minimax(folds[k], b_use, s2_use, spec, options.minimax);

    FoldDiagnostics& diag = res.folds[k];
    diag.size = folds[k].size();
    diag.sigma2_hat = nu[k].sigma2;
    diag.curvature = nu[k].curvature;
    diag.b_hat_used = b_use;
    diag.sigma2_used = s2_use;
    diag.t_hat_scaled = sol.t_hat;
    diag.objective = sol.objective;
    diag.max_equality_residual = sol.equality_residuals.cwiseAbs().maxCoeff();
    diag.kkt_residual = sol.kkt_residual;
    diag.iterations = sol.iterations;
    if (options.check_certificate) {
      diag.certificate_mismatch =
          recover_primal_from_dual(sol.dual_certificate, folds[k], s2_use, b_use, sol.gamma).mismatch;
    }

    for (std::size_t j = 0; j < idx[k]->size(); ++j) {
      const std::size_t i = (*idx[k])[j];
      gamma_window[i] = 0.5 * sol.gamma(static_cast<Eigen::Index>(j));
      resid_window[i] = nu[k].residuals[j];
    }
  }

  // Bias scale t carries x^3 units; B carries x^-3, so B t is scale free.
  for (int k = 0; k < 2; ++k) {
    res.b_hat_folds[k] = unscale_curvature(nu[k].curvature.b_hat, kappa);
    res.t_hat_folds[k] = scale_curvature(res.folds[k].t_hat_scaled, kappa);
  }
  res.b_bound = 0.5 * (res.b_hat_folds[1] * res.t_hat_folds[0] + res.b_hat_folds[0] * res.t_hat_folds[1]);

  res.gamma.assign(sample.size(), 0.0);
  double tau = 0.0;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    res.gamma[kept[j]] = gamma_window[j];
    tau += gamma_window[j] * s.y()[j];
  }
  res.tau_hat = tau;
  res.se_robust = robust_se(gamma_window, resid_window);
  res.half_width = imbens_manski_halfwidth(res.b_bound, res.se_robust, config.alpha);
  res.interval = {res.tau_hat - res.half_width, res.tau_hat + res.half_width};
  res.lindeberg_ratio = lindeberg_ratio(gamma_window);
  return res;
}

}  // namespace plrd
