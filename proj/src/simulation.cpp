#include "plrd/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include "json.hpp"
#include "plrd/baselines.hpp"
#include "plrd/error.hpp"
#include "plrd/rng.hpp"

namespace plrd {

namespace {

constexpr double kCctNoiseSd = 0.1295;

template <typename Mean>
RddSample draw_uniform(std::uint64_t seed, std::size_t n, double noise_sd, Mean mean) {
  Engine engine = make_engine(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = unif(engine);
    y[i] = mean(x[i]) + noise(engine);
  }
  return RddSample(std::move(x), std::move(y), 0.0);
}

}  // namespace

DgpSpec pure_noise_dgp(std::size_t n) {
  DgpSpec d;
  d.name = "pure-noise";
  d.n = n;
  d.true_tau = 0.0;
  d.description = "X ~ Unif[-1,1], Y ~ N(0,1)";
  d.sampler = [n](std::uint64_t seed) { return draw_uniform(seed, n, 1.0, [](double) { return 0.0; }); };
  return d;
}

DgpSpec smooth_cubic_dgp(std::size_t n, double tau) {
  DgpSpec d;
  d.name = "smooth-cubic";
  d.n = n;
  d.true_tau = tau;
  d.description = "X ~ Unif[-1,1], Y = 0.5x + 0.25x^3 + tau W + N(0, 0.5^2)";
  d.sampler = [n, tau](std::uint64_t seed) {
    return draw_uniform(seed, n, 0.5, [tau](double x) { return 0.5 * x + 0.25 * x * x * x + (x >= 0.0 ? tau : 0.0); });
  };
  return d;
}

DgpSpec pure_cubic_dgp(std::size_t n, double noise_sd) {
  DgpSpec d;
  d.name = "pure-cubic";
  d.n = n;
  d.true_tau = 0.0;
  d.description = "X ~ Unif[-1,1], Y = x^3 + noise";
  d.sampler = [n, noise_sd](std::uint64_t seed) {
    return draw_uniform(seed, n, noise_sd, [](double x) { return x * x * x; });
  };
  return d;
}

DgpSpec cct_template_dgp(std::string name, std::function<double(double)> mean, double true_tau, std::size_t n) {
  DgpSpec d;
  d.name = std::move(name);
  d.n = n;
  d.true_tau = true_tau;
  d.description = "X ~ 2 Beta(2,4) - 1, Y = m(X) + N(0, 0.1295^2)";
  d.sampler = [n, mean = std::move(mean)](std::uint64_t seed) {
    Engine engine = make_engine(seed);
    std::gamma_distribution<double> g2(2.0, 1.0);
    std::gamma_distribution<double> g4(4.0, 1.0);
    std::normal_distribution<double> noise(0.0, kCctNoiseSd);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = g2(engine);
      const double b = g4(engine);
      x[i] = 2.0 * (a / (a + b)) - 1.0;
      y[i] = mean(x[i]) + noise(engine);
    }
    return RddSample(std::move(x), std::move(y), 0.0);
  };
  return d;
}

double PiecewisePolynomial::operator()(double x) const {
  const std::vector<double>& c = x >= 0.0 ? treated : control;
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double PiecewisePolynomial::jump() const {
  return (treated.empty() ? 0.0 : treated.front()) - (control.empty() ? 0.0 : control.front());
}

DgpSpec load_cct_dgp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    PiecewisePolynomial m{j.at("control").get<std::vector<double>>(), j.at("treated").get<std::vector<double>>()};
    const auto name = j.value("name", std::string("cct-custom"));
    const auto n = j.value("n", std::size_t{500});
    return cct_template_dgp(name, m, m.jump(), n);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "'" + path + "': " + e.what());
  }
}

void DgpRegistry::add(DgpSpec dgp) {
  const std::string key = dgp.name;
  dgps_.insert_or_assign(key, std::move(dgp));
}

const DgpSpec* DgpRegistry::find(const std::string& name) const {
  const auto it = dgps_.find(name);
  return it == dgps_.end() ? nullptr : &it->second;
}

std::vector<std::string> DgpRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : dgps_) out.push_back(k);
  return out;
}

DgpRegistry register_builtin_dgps() {
  DgpRegistry reg;
  reg.add(pure_noise_dgp());
  reg.add(smooth_cubic_dgp());
  reg.add(pure_cubic_dgp());
  reg.add(cct_template_dgp("cct-template", [](double) { return 0.0; }, 0.0, 500));
  return reg;
}

IntervalMethod plrd_method(const PlrdConfig& config, const EstimateOptions& options) {
  return {"plrd", [config, options](const RddSample& sample, std::uint64_t seed) {
            PlrdConfig c = config;
            c.split_seed = seed;
            return estimate(sample, c, options).interval;
          }};
}

IntervalMethod llr_method(std::string name, double ci_multiplier) {
  return {std::move(name), [ci_multiplier](const RddSample& sample, std::uint64_t) {
            return llr(sample, rot_bandwidth(sample), KernelType::Triangular, ci_multiplier).interval();
          }};
}

std::vector<IntervalMethod> builtin_methods(const PlrdConfig& config) {
  return {plrd_method(config), llr_method("llr-conventional", kConventionalMultiplier),
          llr_method("llr-inflated", kInflatedMultiplier)};
}

bool SimulationReport::valid() const {
  return replications > 0 && static_cast<double>(failures) <= kMaxFailureRate * static_cast<double>(replications);
}

namespace {

struct Outcome {
  bool failed = true;
  bool covered = false;
  double width = 0.0;
  std::string error;
};

}  // namespace

std::vector<SimulationReport> run_study(const DgpSpec& dgp, const std::vector<IntervalMethod>& methods,
                                        std::size_t replications, std::uint64_t base_seed, int threads) {
  if (replications < kMinReplications) {
    throw Error(ErrorCode::InvalidConfig, "a study needs at least " + std::to_string(kMinReplications) + " replications");
  }
  const std::size_t m = methods.size();
  std::vector<Outcome> outcomes(replications * m);

  auto run_one = [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(base_seed, r);
    RddSample sample;
    std::string draw_error;
    try {
      sample = dgp.sampler(seed);
    } catch (const std::exception& e) {
      draw_error = e.what();
    }
    for (std::size_t k = 0; k < m; ++k) {
      Outcome& o = outcomes[r * m + k];
      if (!draw_error.empty()) {
        o.error = draw_error;
        continue;
      }
      try {
        const auto ci = methods[k].run(sample, derive_seed(seed, k + 1));
        o.failed = false;
        o.covered = ci[0] <= dgp.true_tau && dgp.true_tau <= ci[1];
        o.width = ci[1] - ci[0];
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    for (std::size_t r = 0; r < replications; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < replications; r = next++) run_one(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<SimulationReport> reports;
  for (std::size_t k = 0; k < m; ++k) {
    SimulationReport rep;
    rep.method = methods[k].name;
    rep.dgp = dgp.name;
    rep.replications = replications;
    rep.base_seed = base_seed;
    rep.seed_stream = "sample seed = derive_seed(base_seed, r); method seed = derive_seed(sample seed, method index + 1)";
    std::size_t covered = 0;
    double width_sum = 0.0;
    for (std::size_t r = 0; r < replications; ++r) {
      const Outcome& o = outcomes[r * m + k];
      if (o.failed) {
        if (rep.failures++ == 0) rep.first_failure = o.error;
        continue;
      }
      covered += o.covered ? 1 : 0;
      width_sum += o.width;
    }
    const std::size_t ok = replications - rep.failures;
    if (ok > 0) {
      rep.coverage = static_cast<double>(covered) / static_cast<double>(ok);
      rep.mean_width = width_sum / static_cast<double>(ok);
      rep.mc_se_coverage = std::sqrt(rep.coverage * (1.0 - rep.coverage) / static_cast<double>(ok));
    } else {
      rep.coverage = rep.mean_width = rep.mc_se_coverage = std::nan("");
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

namespace {

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<SimulationReport>& reports) {
  out << "method,dgp,reps,coverage,mc_se,mean_width,failures\n";
  for (const auto& r : reports) {
    out << r.method << ',' << r.dgp << ',' << r.replications << ',' << fmt(r.coverage, "%.17g") << ','
        << fmt(r.mc_se_coverage, "%.17g") << ',' << fmt(r.mean_width, "%.17g") << ',' << r.failures << '\n';
  }
}

void write_report_text(std::ostream& out, const std::vector<SimulationReport>& reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %-14s %7s %9s %8s %10s %8s\n", "method", "dgp", "reps", "coverage",
                "mc_se", "width", "failures");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-18s %-14s %7zu %8.2f%% %8.4f %10.4f %8zu%s\n", r.method.c_str(),
                  r.dgp.c_str(), r.replications, 100.0 * r.coverage, r.mc_se_coverage, r.mean_width, r.failures,
                  r.valid() ? "" : "  (invalid: failure rate above 1%)");
    out << line;
  }
}

}  // namespace plrd
