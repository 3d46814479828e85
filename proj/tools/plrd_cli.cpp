#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "plrd/error.hpp"
#include "plrd/inference.hpp"
#include "plrd/json_io.hpp"
#include "plrd/minimax.hpp"
#include "plrd/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

struct Args {
  std::string input;
  std::optional<double> cutoff;
  std::optional<double> alpha;
  std::optional<double> ell;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::size_t> reps;
  std::string dgp = "pure-noise";
  std::string dgp_file;
  std::string format;
  int threads = 1;
};

plrd::PlrdConfig make_config(const Args& a) {
  plrd::PlrdConfig c;
  if (a.alpha) c.alpha = *a.alpha;
  if (a.ell) c.window_ell = *a.ell;
  if (a.epsilon) c.epsilon_floor = *a.epsilon;
  if (a.seed) c.split_seed = *a.seed;
  if (a.grid) c.grid_points = *a.grid;
  plrd::validate_config(c);
  return c;
}

plrd::RddSample load_input(const Args& a) {
  if (a.input.empty()) throw plrd::Error(plrd::ErrorCode::InvalidConfig, "--input is required");
  if (!a.cutoff) throw plrd::Error(plrd::ErrorCode::InvalidConfig, "--cutoff is required");
  return plrd::read_csv(a.input, *a.cutoff);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int cmd_estimate(const Args& a) {
  const plrd::PlrdConfig config = make_config(a);
  const plrd::RddSample sample = load_input(a);
  const plrd::PlrdResult r = plrd::estimate(sample, config);
  const std::string format = a.format.empty() ? "json" : a.format;
  if (format == "json") {
    std::cout << plrd::dump_json(plrd::to_json(r)) << '\n';
  } else if (format == "text") {
    const double level = 100.0 * (1.0 - r.alpha);
    std::cout << "tau_hat      " << fmt(r.tau_hat) << '\n'
              << fmt(level) << "% CI      [" << fmt(r.interval[0]) << ", " << fmt(r.interval[1]) << "]\n"
              << "half_width   " << fmt(r.half_width) << '\n'
              << "bias bound   " << fmt(r.b_bound) << '\n'
              << "robust se    " << fmt(r.se_robust) << '\n'
              << "branch       " << plrd::to_string(r.branch) << " (ANOVA p = " << fmt(r.anova.p_value) << ")\n"
              << "B_hat folds  " << fmt(r.b_hat_folds[0]) << ", " << fmt(r.b_hat_folds[1]) << '\n'
              << "t_hat folds  " << fmt(r.t_hat_folds[0]) << ", " << fmt(r.t_hat_folds[1]) << '\n'
              << "lindeberg    " << fmt(r.lindeberg_ratio) << '\n'
              << "n used       " << r.n_used << " of " << r.n_total << '\n';
  } else {
    throw plrd::Error(plrd::ErrorCode::InvalidConfig, "estimate supports --format json or text");
  }
  return kExitOk;
}

int cmd_weights(const Args& a) {
  if (!a.format.empty() && a.format != "csv") {
    throw plrd::Error(plrd::ErrorCode::InvalidConfig, "weights only writes csv");
  }
  const plrd::PlrdConfig config = make_config(a);
  const plrd::RddSample sample = load_input(a);
  const plrd::PlrdResult r = plrd::estimate(sample, config);
  std::vector<int> w(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) w[i] = sample.treated(i) ? 1 : 0;
  plrd::write_weights_csv(std::cout, sample.x(), w, r.gamma);
  return kExitOk;
}

int cmd_simulate(const Args& a) {
  plrd::DgpRegistry registry = plrd::register_builtin_dgps();
  std::string name = a.dgp;
  if (!a.dgp_file.empty()) {
    plrd::DgpSpec custom = plrd::load_cct_dgp(a.dgp_file);
    name = custom.name;
    registry.add(std::move(custom));
  }
  const plrd::DgpSpec* dgp = registry.find(name);
  if (dgp == nullptr) {
    std::string known;
    for (const auto& k : registry.names()) known += (known.empty() ? "" : ", ") + k;
    throw plrd::Error(plrd::ErrorCode::InvalidConfig, "unknown dgp '" + name + "' (known: " + known + ")");
  }
  const plrd::PlrdConfig config = make_config(a);
  const auto methods = plrd::builtin_methods(config);
  const auto reports = plrd::run_study(*dgp, methods, a.reps.value_or(2000), a.seed.value_or(0), a.threads);

  const std::string format = a.format.empty() ? "csv" : a.format;
  if (format == "csv") {
    plrd::write_report_csv(std::cout, reports);
  } else if (format == "text") {
    plrd::write_report_text(std::cout, reports);
  } else if (format == "json") {
    plrd::Json arr = plrd::Json::array();
    for (const auto& r : reports) {
      plrd::Json j;
      j["method"] = r.method;
      j["dgp"] = r.dgp;
      j["reps"] = r.replications;
      j["coverage"] = r.coverage;
      j["mc_se"] = r.mc_se_coverage;
      j["mean_width"] = r.mean_width;
      j["failures"] = r.failures;
      j["valid"] = r.valid();
      j["base_seed"] = r.base_seed;
      j["seed_stream"] = r.seed_stream;
      arr.push_back(j);
    }
    std::cout << plrd::dump_json(arr) << '\n';
  } else {
    throw plrd::Error(plrd::ErrorCode::InvalidConfig, "unknown --format '" + format + "'");
  }
  for (const auto& r : reports) {
    if (r.failures > 0) {
      std::cerr << "plrd: " << r.method << ": " << r.failures << " failed replications, first: " << r.first_failure
                << '\n';
    }
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--alpha", a.alpha, "Confidence complement, default 0.05");
  cmd->add_option("--ell", a.ell, "Window half-width around the cutoff, default full range");
  cmd->add_option("--epsilon", a.epsilon, "Lower bound on the curvature estimate, default SD[Y]/100");
  cmd->add_option("--seed", a.seed, "Seed for the fold split (base seed for simulate)");
  cmd->add_option("--grid", a.grid, "Grid points for the bias kernel, default 400");
  cmd->add_option("--format", a.format, "Output format: json, text or csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially linear regression discontinuity inference"};
  app.require_subcommand(1);
  Args a;

  auto* est = app.add_subcommand("estimate", "Point estimate and bias-aware interval for a CSV sample");
  est->add_option("--input", a.input, "CSV file with columns x,y");
  est->add_option("--cutoff", a.cutoff, "Cutoff on the running variable");
  add_common(est, a);

  auto* wts = app.add_subcommand("weights", "Dump the estimator weights as x,w,gamma");
  wts->add_option("--input", a.input, "CSV file with columns x,y");
  wts->add_option("--cutoff", a.cutoff, "Cutoff on the running variable");
  add_common(wts, a);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage study");
  sim->add_option("--dgp", a.dgp, "Registered data-generating process, default pure-noise");
  sim->add_option("--dgp-file", a.dgp_file, "JSON file with piecewise-polynomial mean coefficients");
  sim->add_option("--reps", a.reps, "Replications, default 2000");
  sim->add_option("--threads", a.threads, "Worker threads (output does not depend on it)");
  add_common(sim, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitData;
  }

  try {
    if (*est) return cmd_estimate(a);
    if (*wts) return cmd_weights(a);
    return cmd_simulate(a);
  } catch (const plrd::Error& e) {
    std::cerr << "plrd: " << e.what() << '\n';
    return plrd::is_data_error(e.code()) ? kExitData : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "plrd: " << e.what() << '\n';
    return kExitSolver;
  }
}
