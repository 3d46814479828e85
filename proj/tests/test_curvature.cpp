#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "plrd/curvature.hpp"

using namespace plrd;

namespace {

RddSample draw(std::size_t n, std::uint64_t seed, const std::function<double(double, oracle::Draws&)>& f) {
  oracle::Draws d(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = d.uniform(-1.0, 1.0);
    y[i] = f(x[i], d);
  }
  return RddSample(x, y, 0.0);
}

double oracle_magnitude(const oracle::OlsResult& fit, std::size_t j) {
  const double b = fit.beta[j];
  const double se = std::sqrt(fit.covariance[j][j]);
  return std::abs(b) + 1.96 * se;
}

}  // namespace

TEST(Safeguard, MagnitudeFormula) {
  EXPECT_DOUBLE_EQ(safeguarded_magnitude(2.0, 0.5), 2.0 + 1.96 * 0.5);
  EXPECT_DOUBLE_EQ(safeguarded_magnitude(-2.0, 0.5), 2.0 + 1.96 * 0.5);
  EXPECT_DOUBLE_EQ(safeguarded_magnitude(0.0, 0.0), 0.0);
}

TEST(SharedCurvature, NoiselessExamples) {
  const CurvatureEstimate cube = estimate_b_shared(draw(60, 1, [](double x, auto&) { return x * x * x; }), 0.01);
  EXPECT_NEAR(cube.beta3[0], 6.0, 1e-9);
  EXPECT_NEAR(cube.beta3_se[0], 0.0, 1e-7);
  EXPECT_NEAR(cube.b_hat, 6.0, 1e-6);
  EXPECT_FALSE(cube.epsilon_used);

  const CurvatureEstimate sq = estimate_b_shared(draw(60, 2, [](double x, auto&) { return x * x; }), 0.01);
  EXPECT_NEAR(sq.beta3[0], 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(sq.b_hat, 0.01);
  EXPECT_TRUE(sq.epsilon_used);
}

TEST(SharedCurvature, MatchesIndependentOls) {
  const RddSample s = draw(5000, 3, [](double x, oracle::Draws& d) { return x * x * x + d.normal(0.1); });
  oracle::Matrix rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s.x()[i];
    const double w = s.treated(i) ? 1.0 : 0.0;
    rows.push_back({w, 1.0 - w, w * x, (1.0 - w) * x, x * x / 2.0, x * x * x / 6.0});
  }
  const auto ref = oracle::ols(rows, {s.y().begin(), s.y().end()});
  const double expect = std::max(oracle_magnitude(ref, 5), 0.01);
  EXPECT_NEAR(estimate_b_shared(s, 0.01).b_hat, expect, 1e-9);
}

TEST(PerSideCurvature, NoiselessAndFlat) {
  const RddSample s = draw(80, 4, [](double x, auto&) { return x >= 0 ? x * x * x : -x * x * x; });
  const CurvatureEstimate e = estimate_b_per_side(s, 0.01);
  EXPECT_NEAR(e.b_hat, 6.0, 1e-6);
  EXPECT_NEAR(e.beta3[0], -6.0, 1e-9);
  EXPECT_NEAR(e.beta3[1], 6.0, 1e-9);

  const CurvatureEstimate flat = estimate_b_per_side(draw(80, 5, [](double, auto&) { return 1.0; }), 0.05);
  EXPECT_DOUBLE_EQ(flat.b_hat, 0.05);
  EXPECT_TRUE(flat.epsilon_used);
}

TEST(PerSideCurvature, MatchesRestrictedOls) {
  const RddSample s = draw(600, 6, [](double x, oracle::Draws& d) {
    return x >= 0 ? 2 * x * x * x + d.normal(0.5) : -x * x * x + d.normal(0.05);
  });
  double expect = 0.001;
  for (int side = 0; side < 2; ++side) {
    oracle::Matrix rows;
    std::vector<double> y;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.treated(i) != (side == 1)) continue;
      const double x = s.x()[i];
      rows.push_back({1.0, x, x * x / 2.0, x * x * x / 6.0});
      y.push_back(s.y()[i]);
    }
    expect = std::max(expect, oracle_magnitude(oracle::ols(rows, y), 3));
  }
  EXPECT_NEAR(estimate_b_per_side(s, 0.001).b_hat, expect, 1e-9);
}

TEST(CurvatureProperties, MonotoneInEpsilonAndDominatesBeta) {
  const RddSample s = draw(200, 7, [](double x, oracle::Draws& d) { return 0.3 * x * x * x + d.normal(0.2); });
  double prev = 0.0;
  for (double eps : {0.0, 0.1, 1.0, 3.0, 10.0, 100.0}) {
    const CurvatureEstimate shared = estimate_b_shared(s, eps);
    const CurvatureEstimate sides = estimate_b_per_side(s, eps);
    EXPECT_GE(shared.b_hat, prev);
    prev = shared.b_hat;
    EXPECT_GE(shared.b_hat, std::abs(shared.beta3[0]));
    EXPECT_GE(sides.b_hat, std::max(std::abs(sides.beta3[0]), std::abs(sides.beta3[1])));
  }
}

TEST(CurvatureProperties, OutcomeScaleEquivariance) {
  const RddSample s = draw(300, 8, [](double x, oracle::Draws& d) { return x * x * x + d.normal(0.3); });
  const double k = 4.0;  // power of two keeps the scaling exact
  std::vector<double> y(s.y().begin(), s.y().end());
  for (double& v : y) v *= k;
  const RddSample t({s.x().begin(), s.x().end()}, y, 0.0);
  for (auto branch : {CurvatureBranch::SharedCurvature, CurvatureBranch::DifferentCurvature}) {
    const CurvatureEstimate a = estimate_b(s, 0.01, branch);
    const CurvatureEstimate b = estimate_b(t, 0.01 * k, branch);
    EXPECT_NEAR(b.b_hat, k * a.b_hat, 1e-12 * k * a.b_hat);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(b.beta3[j], k * a.beta3[j], 1e-12 * std::abs(k * a.beta3[j]) + 1e-12);
      EXPECT_NEAR(b.beta3_se[j], k * a.beta3_se[j], 1e-12 * k * a.beta3_se[j]);
    }
  }
}
