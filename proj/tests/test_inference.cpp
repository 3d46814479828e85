#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "plrd/error.hpp"
#include "plrd/inference.hpp"

using namespace plrd;

namespace {

RddSample noisy_sample(std::size_t n, std::uint64_t seed, double noise = 1.0) {
  oracle::Draws d(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = d.uniform(-1.0, 1.0);
    y[i] = 0.4 * x[i] + 0.2 * x[i] * x[i] * x[i] + (x[i] >= 0 ? 0.5 : 0.0) + d.normal(noise);
  }
  return RddSample(x, y, 0.0);
}

double z(double p) { return boost::math::quantile(boost::math::normal(), p); }

void expect_rel(double a, double b, double tol) { EXPECT_NEAR(a, b, tol * std::max(std::abs(b), 1e-300)); }

}  // namespace

TEST(SplitFolds, SizesPartitionAndDeterminism) {
  for (std::size_t n : {10u, 11u, 257u}) {
    const auto [a, b] = split_folds(n, 42);
    EXPECT_EQ(a.size(), (n + 1) / 2);
    EXPECT_EQ(b.size(), n / 2);
    std::set<std::size_t> all(a.begin(), a.end());
    all.insert(b.begin(), b.end());
    EXPECT_EQ(all.size(), n);
    EXPECT_EQ(*all.rbegin(), n - 1);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    const auto again = split_folds(n, 42);
    EXPECT_EQ(again.first, a);
    EXPECT_EQ(again.second, b);
  }
  EXPECT_NE(split_folds(100, 1).first, split_folds(100, 2).first);
}

TEST(ImbensManski, ClosedFormCases) {
  EXPECT_NEAR(imbens_manski_halfwidth(0.0, 1.0, 0.05), 1.959964, 1e-5);
  EXPECT_NEAR(imbens_manski_halfwidth(0.0, 2.5, 0.1), 2.5 * z(0.95), 1e-9);
  EXPECT_EQ(imbens_manski_halfwidth(3.0, 0.0, 0.05), 3.0);
  EXPECT_THROW(imbens_manski_halfwidth(1.0, 1.0, 1.5), Error);
  EXPECT_THROW(imbens_manski_halfwidth(1.0, 1.0, 0.0), Error);
  EXPECT_THROW(imbens_manski_halfwidth(-1.0, 1.0, 0.05), Error);
}

TEST(ImbensManski, SolvesCoverageEquation) {
  const boost::math::normal n01;
  for (double b : {0.1, 1.0, 4.0}) {
    for (double s : {0.3, 1.0, 2.0}) {
      const double h = imbens_manski_halfwidth(b, s, 0.05);
      const double cover = boost::math::cdf(n01, (h - b) / s) - boost::math::cdf(n01, (-h - b) / s);
      EXPECT_NEAR(cover, 0.95, 1e-9) << b << ' ' << s;
    }
  }
}

TEST(ImbensManski, MonotoneAndAsymptote) {
  double prev = 0.0;
  for (double b = 0.0; b <= 5.0; b += 0.25) {
    const double h = imbens_manski_halfwidth(b, 1.0, 0.05);
    EXPECT_GT(h, prev);
    prev = h;
  }
  prev = 0.0;
  for (double s = 0.1; s <= 5.0; s += 0.3) {
    const double h = imbens_manski_halfwidth(1.0, s, 0.05);
    EXPECT_GT(h, prev);
    prev = h;
  }
  EXPECT_GE(imbens_manski_halfwidth(1.0, 1.0, 0.01), imbens_manski_halfwidth(1.0, 1.0, 0.05));
  EXPECT_GE(imbens_manski_halfwidth(1.0, 1.0, 0.05), imbens_manski_halfwidth(1.0, 1.0, 0.2));
  EXPECT_NEAR(imbens_manski_halfwidth(50.0, 1.0, 0.05), 50.0 + z(0.95), 1e-4);
}

TEST(ImbensManski, MonteCarloCoverage) {
  const double h = imbens_manski_halfwidth(1.0, 1.0, 0.05);
  std::mt19937_64 engine(2024);
  std::normal_distribution<double> zdist;
  constexpr int kDraws = 1000000;
  int inside = 0;
  for (int k = 0; k < kDraws; ++k) inside += std::abs(1.0 + zdist(engine)) <= h ? 1 : 0;
  const double p = static_cast<double>(inside) / kDraws;
  EXPECT_LE(std::abs(p - 0.95), 3.0 * std::sqrt(0.95 * 0.05 / kDraws));
}

TEST(RobustSe, ExamplesAndSummationOrder) {
  EXPECT_EQ(robust_se(std::vector<double>{0.3, -0.2}, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(robust_se(std::vector<double>{0.0, 1.0, 0.0}, std::vector<double>{5.0, 2.0, 7.0}), 2.0);
  oracle::Draws d(3);
  std::vector<double> g(1000), r(1000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = d.normal(0.01);
    r[i] = d.normal();
  }
  double rev = 0.0;
  for (std::size_t i = g.size(); i-- > 0;) rev += g[i] * g[i] * r[i] * r[i];
  EXPECT_NEAR(robust_se(g, r), std::sqrt(rev), 1e-12 * std::sqrt(rev));
  EXPECT_THROW(robust_se(std::vector<double>{1.0}, std::vector<double>{}), Error);
}

TEST(Lindeberg, Ratio) {
  EXPECT_EQ(lindeberg_ratio(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(lindeberg_ratio(std::vector<double>{3.0, -4.0}), 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(lindeberg_ratio(std::vector<double>(100, 0.1)), 0.1);
}

TEST(Estimate, ConstantOutcome) {
  oracle::Draws d(4);
  std::vector<double> x(120);
  for (double& v : x) v = d.uniform(-1.0, 1.0);
  PlrdConfig config;
  config.epsilon_floor = 0.05;
  const PlrdResult r = estimate(RddSample(x, std::vector<double>(120, 2.5), 0.0), config);
  EXPECT_NEAR(r.tau_hat, 0.0, 1e-10);
  EXPECT_NEAR(r.se_robust, 0.0, 1e-10);
  EXPECT_NEAR(r.half_width, r.b_bound, 1e-10);
  EXPECT_GT(r.b_bound, 0.0);
}

TEST(Estimate, NoiselessLinearModel) {
  oracle::Draws d(5);
  std::vector<double> x(150), y(150);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d.uniform(-1.0, 1.0);
    y[i] = 0.7 - 1.3 * x[i] + (x[i] >= 0 ? 2.0 : 0.0);
  }
  const PlrdResult r = estimate(RddSample(x, y, 0.0), PlrdConfig{});
  EXPECT_NEAR(r.tau_hat, 2.0, 1e-6);
}

TEST(Estimate, ResultInvariants) {
  for (std::uint64_t seed : {6, 7, 8}) {
    const RddSample s = noisy_sample(200, seed);
    const PlrdResult r = estimate(s, PlrdConfig{});
    EXPECT_DOUBLE_EQ(r.interval[0], r.tau_hat - r.half_width);
    EXPECT_DOUBLE_EQ(r.interval[1], r.tau_hat + r.half_width);
    EXPECT_GE(r.half_width, z(0.975) * r.se_robust - 1e-12);
    EXPECT_GE(r.half_width, r.b_bound * (1 - 1e-12));
    EXPECT_EQ(r.b_bound, 0.5 * (r.b_hat_folds[1] * r.t_hat_folds[0] + r.b_hat_folds[0] * r.t_hat_folds[1]));
    EXPECT_EQ(r.n_used, 200u);
    EXPECT_EQ(r.gamma.size(), 200u);
    double tau = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) tau += r.gamma[i] * s.y()[i];
    EXPECT_NEAR(tau, r.tau_hat, 1e-12);
    for (const auto& f : r.folds) {
      EXPECT_LE(f.max_equality_residual, 1e-8);
      EXPECT_LE(f.certificate_mismatch, 1e-6);
    }
  }
}

TEST(Estimate, WindowZeroesOutsideWeights) {
  const RddSample s = noisy_sample(300, 9);
  PlrdConfig config;
  config.window_ell = 0.5;
  const PlrdResult r = estimate(s, config);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s.x()[i]) > 0.5) {
      EXPECT_EQ(r.gamma[i], 0.0);
    } else {
      ++inside;
    }
  }
  EXPECT_EQ(r.n_used, inside);
  EXPECT_EQ(r.n_total, 300u);
}

TEST(Estimate, Determinism) {
  const RddSample s = noisy_sample(160, 10);
  PlrdConfig config;
  config.split_seed = 77;
  const PlrdResult a = estimate(s, config);
  const PlrdResult b = estimate(s, config);
  EXPECT_EQ(a.tau_hat, b.tau_hat);
  EXPECT_EQ(a.half_width, b.half_width);
  EXPECT_EQ(a.gamma, b.gamma);
}

TEST(Estimate, OutcomeLocationAndScale) {
  const RddSample s = noisy_sample(180, 11);
  const PlrdResult base = estimate(s, PlrdConfig{});
  std::vector<double> shifted(s.y().begin(), s.y().end()), scaled = shifted;
  for (double& v : shifted) v += 10.0;
  for (double& v : scaled) v *= 3.0;
  const PlrdResult rs = estimate(RddSample({s.x().begin(), s.x().end()}, shifted, 0.0), PlrdConfig{});
  const PlrdResult rk = estimate(RddSample({s.x().begin(), s.x().end()}, scaled, 0.0), PlrdConfig{});
  EXPECT_NEAR(rs.tau_hat, base.tau_hat, 1e-8);
  expect_rel(rs.se_robust, base.se_robust, 1e-6);
  expect_rel(rs.b_bound, base.b_bound, 1e-6);
  expect_rel(rs.half_width, base.half_width, 1e-6);
  expect_rel(rk.tau_hat, 3.0 * base.tau_hat, 1e-6);
  expect_rel(rk.se_robust, 3.0 * base.se_robust, 1e-6);
  expect_rel(rk.b_bound, 3.0 * base.b_bound, 1e-6);
  expect_rel(rk.half_width, 3.0 * base.half_width, 1e-6);
}

TEST(Estimate, RunningVariableRescaling) {
  const RddSample s = noisy_sample(180, 12);
  PlrdConfig config;
  config.window_ell = 0.8;
  config.epsilon_floor = 0.02;
  const PlrdResult base = estimate(s, config);

  const double k = 7.5;
  const double c = 40.0;
  std::vector<double> x(s.x().begin(), s.x().end());
  for (double& v : x) v = c + k * v;
  PlrdConfig moved = config;
  moved.window_ell = k * 0.8;
  moved.epsilon_floor = 0.02 / (k * k * k);
  const PlrdResult r = estimate(RddSample(x, {s.y().begin(), s.y().end()}, c), moved);
  expect_rel(r.tau_hat, base.tau_hat, 1e-6);
  expect_rel(r.half_width, base.half_width, 1e-6);
  expect_rel(r.b_bound, base.b_bound, 1e-6);
  expect_rel(r.b_hat_folds[0], base.b_hat_folds[0] / (k * k * k), 1e-6);
}

TEST(Estimate, DifferentCurvatureBranch) {
  oracle::Draws d(13);
  std::vector<double> x(400), y(400);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d.uniform(-1.0, 1.0);
    y[i] = (x[i] >= 0 ? 3.0 : -3.0) * x[i] * x[i] * x[i] + d.normal(0.05);
  }
  const PlrdResult r = estimate(RddSample(x, y, 0.0), PlrdConfig{});
  EXPECT_EQ(r.branch, CurvatureBranch::DifferentCurvature);
  EXPECT_TRUE(r.anova.reject);
  EXPECT_LE(r.interval[0], 0.0);
  EXPECT_GE(r.interval[1], 0.0);
}

TEST(Estimate, RejectsBadInput) {
  PlrdConfig config;
  config.alpha = 2.0;
  EXPECT_THROW(estimate(noisy_sample(50, 14), config), Error);
  RddSample one_sided({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, std::vector<double>(10, 0.0), 0.0);
  EXPECT_THROW(estimate(one_sided, PlrdConfig{}), Error);
}
