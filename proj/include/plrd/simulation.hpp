#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "plrd/inference.hpp"
#include "plrd/sample.hpp"

namespace plrd {

/// A data-generating process; `sampler` must be a pure function of the seed.
struct DgpSpec {
  std::string name;
  std::function<RddSample(std::uint64_t seed)> sampler;
  double true_tau = 0.0;
  std::size_t n = 0;
  std::string description;
};

/// X ~ Unif[-1, 1], Y ~ N(0, 1), cutoff 0, tau = 0.
DgpSpec pure_noise_dgp(std::size_t n = 500);

/// X ~ Unif[-1, 1], Y = 0.5 x + 0.25 x^3 + tau W + N(0, 0.5^2).
DgpSpec smooth_cubic_dgp(std::size_t n = 500, double tau = 1.0);

/// X ~ Unif[-1, 1], Y = x^3 + N(0, noise_sd^2); the third derivative is 6.
DgpSpec pure_cubic_dgp(std::size_t n = 20000, double noise_sd = 0.1);

/// X ~ 2 Beta(2, 4) - 1, Y = m(X) + N(0, 0.1295^2), cutoff 0. The caller
/// supplies m and its jump at 0.
DgpSpec cct_template_dgp(std::string name, std::function<double(double)> mean, double true_tau, std::size_t n);

/// Mean function given by one polynomial per side (coefficients of 1, x, x^2, ...).
struct PiecewisePolynomial {
  std::vector<double> control;
  std::vector<double> treated;

  double operator()(double x) const;
  double jump() const;
};

/// Reads {"name": ..., "n": ..., "control": [...], "treated": [...]} and
/// wraps it in the template above. Throws ParseError / Io.
DgpSpec load_cct_dgp(const std::string& path);

class DgpRegistry {
 public:
  void add(DgpSpec dgp);
  const DgpSpec* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, DgpSpec> dgps_;
};

/// "pure-noise", "smooth-cubic", "pure-cubic" and "cct-template" (the
/// template with m = 0 as a placeholder until coefficients are supplied).
DgpRegistry register_builtin_dgps();

/// An interval procedure under study; `seed` feeds any internal randomness.
struct IntervalMethod {
  std::string name;
  std::function<std::array<double, 2>(const RddSample& sample, std::uint64_t seed)> run;
};

IntervalMethod plrd_method(const PlrdConfig& config, const EstimateOptions& options = {});
/// Local linear fit at the rule-of-thumb bandwidth, triangular kernel.
IntervalMethod llr_method(std::string name, double ci_multiplier);
/// plrd, llr-conventional, llr-inflated
std::vector<IntervalMethod> builtin_methods(const PlrdConfig& config);

inline constexpr std::size_t kMinReplications = 100;
inline constexpr double kMaxFailureRate = 0.01;

struct SimulationReport {
  std::string method;
  std::string dgp;
  std::size_t replications = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double mc_se_coverage = 0.0;
  std::size_t failures = 0;
  std::uint64_t base_seed = 0;
  std::string seed_stream;
  std::string first_failure;

  bool valid() const;
};

/// Replication r draws its sample from derive_seed(base_seed, r); every method
/// sees that sample. Failed replications are excluded from coverage and width
/// and counted. Results do not depend on `threads`.
/// Throws InvalidConfig when replications < 100.
std::vector<SimulationReport> run_study(const DgpSpec& dgp, const std::vector<IntervalMethod>& methods,
                                        std::size_t replications, std::uint64_t base_seed, int threads = 1);

/// method,dgp,reps,coverage,mc_se,mean_width,failures
void write_report_csv(std::ostream& out, const std::vector<SimulationReport>& reports);
void write_report_text(std::ostream& out, const std::vector<SimulationReport>& reports);

}  // namespace plrd
