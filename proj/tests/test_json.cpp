#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "plrd/json_io.hpp"

using namespace plrd;

TEST(JsonIo, NumbersUseShortestRoundTripDigits) {
  Json j;
  j["a"] = 0.1;
  j["b"] = -0.0;
  j["c"] = std::numeric_limits<double>::quiet_NaN();
  j["d"] = std::numeric_limits<double>::infinity();
  j["e"] = 3;
  j["f"] = 1e300;
  EXPECT_EQ(dump_json(j, -1), R"({"a":0.10000000000000001,"b":0,"c":null,"d":null,"e":3,"f":1.0000000000000001e+300})");
  EXPECT_EQ(Json::parse(dump_json(j))["a"].get<double>(), 0.1);
}

TEST(JsonIo, ReserializationIsByteIdentical) {
  PlrdResult r;
  r.tau_hat = -0.123456789012345678;
  r.b_bound = 1.0 / 3.0;
  r.se_robust = 2.0;
  r.half_width = 0.75;
  r.interval = {r.tau_hat - 0.75, r.tau_hat + 0.75};
  r.b_hat_folds = {6.0 / 7.0, 1e-9};
  r.t_hat_folds = {std::sqrt(2.0), 5e-324};
  r.n_used = 500;
  r.n_total = 512;
  r.anova.df2 = 492;
  r.anova.p_value = 0.5;
  const std::string once = dump_json(to_json(r));
  const std::string twice = dump_json(Json::parse(once));
  EXPECT_EQ(once, twice);
}

TEST(JsonIo, ResultSchema) {
  const Json j = to_json(PlrdResult{});
  for (const char* key : {"tau_hat", "b_bound", "se_robust", "half_width", "interval", "branch", "b_hat_folds",
                          "t_hat_folds", "lindeberg_ratio", "n_used", "anova", "folds"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["interval"].size(), 2u);
  EXPECT_EQ(j["folds"].size(), 2u);
  EXPECT_EQ(j["branch"], "shared");
}
