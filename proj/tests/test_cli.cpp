#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "plrd/json_io.hpp"

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(PLRD_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

// Noisy sample with a few points outside |x| <= 0.8.
std::string write_sample() {
  const std::string path = temp_path("plrd_cli_sample.csv");
  std::ofstream out(path);
  out << "x,y\n";
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int i = 0; i < 200; ++i) {
    const double x = unif(engine);
    out << x << ',' << 0.3 * x + (x >= 0 ? 1.0 : 0.0) + noise(engine) << '\n';
  }
  return path;
}

}  // namespace

TEST(Cli, EstimatePrintsJson) {
  const CliRun r = run("estimate --input " + write_sample() + " --cutoff 0 --seed 4");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"tau_hat", "half_width", "interval", "branch"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["interval"].size(), 2u);
}

TEST(Cli, JsonOutputRoundTrips) {
  const CliRun r = run("estimate --input " + write_sample() + " --cutoff 0");
  ASSERT_EQ(r.status, 0);
  ASSERT_FALSE(r.out.empty());
  const std::string body = r.out.substr(0, r.out.size() - 1);  // trailing newline
  EXPECT_EQ(plrd::dump_json(plrd::Json::parse(body)), body);
  EXPECT_EQ(run("estimate --input " + write_sample() + " --cutoff 0").out, r.out);
}

TEST(Cli, TextFormat) {
  const CliRun r = run("estimate --input " + write_sample() + " --cutoff 0 --format text");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("tau_hat"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("estimate --input /nonexistent.csv --cutoff 0").status, 2);
  EXPECT_EQ(run("estimate --input " + write_sample() + " --cutoff 0 --alpha 1.5").status, 2);
  EXPECT_EQ(run("estimate --cutoff 0").status, 2);
  EXPECT_EQ(run("simulate --dgp unknown --reps 100").status, 2);
  EXPECT_EQ(run("--no-such-flag").status, 2);
  EXPECT_EQ(run("estimate --input " + write_sample() + " --cutoff 5").status, 2);  // one side empty
}

TEST(Cli, WeightsDump) {
  const CliRun r = run("weights --input " + write_sample() + " --cutoff 0 --ell 0.8");
  ASSERT_EQ(r.status, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,w,gamma");
  double treated_sum = 0.0, prev_x = -1e300;
  int rows = 0, zero_outside = 0;
  while (std::getline(in, line)) {
    double x = 0.0, g = 0.0;
    int w = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%d,%lf", &x, &w, &g), 3) << line;
    EXPECT_GE(x, prev_x);
    prev_x = x;
    treated_sum += g * w;
    if (std::abs(x) > 0.8) zero_outside += g == 0.0 ? 1 : 0;
    ++rows;
  }
  EXPECT_EQ(rows, 200);
  EXPECT_NEAR(treated_sum, 1.0, 1e-8);
  EXPECT_GT(zero_outside, 0);
}

TEST(Cli, SimulateIsDeterministic) {
  const std::string dgp = temp_path("plrd_cli_dgp.json");
  std::ofstream(dgp) << R"({"name": "small", "n": 60, "control": [0.0, 0.5], "treated": [0.25, 0.5]})";
  const std::string args = "simulate --dgp-file " + dgp + " --reps 100 --seed 1";
  const CliRun a = run(args);
  const CliRun b = run(args + " --threads 2");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "method,dgp,reps,coverage,mc_se,mean_width,failures");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
