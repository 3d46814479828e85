#include "plrd/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "plrd/error.hpp"
#include "plrd/qp_solver.hpp"

namespace plrd {

const char* to_string(SmoothnessClass order) {
  return order == SmoothnessClass::LipschitzSecondDeriv ? "second-derivative" : "first-derivative";
}

FunctionClassSpec make_function_class(const RddSample& sample, SmoothnessClass order,
                                      CurvatureBranch branch, int grid_points) {
  if (grid_points < 20) throw Error(ErrorCode::InvalidConfig, "grid needs at least 20 points");
  if (sample.size() == 0) throw Error(ErrorCode::EmptySide, "empty sample");

  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    lo = std::min(lo, sample.centered(i));
    hi = std::max(hi, sample.centered(i));
  }
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateX, "running variable has no spread");

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(grid_points) + 1 +
               (order == SmoothnessClass::LipschitzFirstDeriv ? sample.size() : 0));
  const double step = (hi - lo) / (grid_points - 1);
  for (int k = 0; k < grid_points; ++k) grid.push_back(k + 1 == grid_points ? hi : lo + k * step);
  grid.push_back(0.0);
  if (order == SmoothnessClass::LipschitzFirstDeriv) {
    for (std::size_t i = 0; i < sample.size(); ++i) grid.push_back(sample.centered(i));
  }
  std::sort(grid.begin(), grid.end());

  // Merge knots closer than a tiny fraction of the range, always keeping 0.
  const double tol = 1e-12 * (hi - lo);
  std::vector<double> merged;
  merged.reserve(grid.size());
  for (double g : grid) {
    if (!merged.empty() && g - merged.back() <= tol) {
      if (g == 0.0) merged.back() = 0.0;
      continue;
    }
    merged.push_back(g);
  }
  // A knot kept just next to 0 would make a near-empty cell.
  std::vector<double> out;
  out.reserve(merged.size());
  for (double g : merged) {
    if (g != 0.0 && std::abs(g) <= tol) continue;
    out.push_back(g);
  }

  FunctionClassSpec spec;
  spec.order = order;
  spec.branch = branch;
  spec.grid = std::move(out);
  return spec;
}

void check_function_class(const FunctionClassSpec& spec) {
  if (spec.grid.size() < 20) throw Error(ErrorCode::InvalidConfig, "grid needs at least 20 points");
  int zeros = 0;
  for (std::size_t k = 0; k < spec.grid.size(); ++k) {
    if (!std::isfinite(spec.grid[k])) throw Error(ErrorCode::InvalidConfig, "non-finite grid point");
    if (k > 0 && !(spec.grid[k] > spec.grid[k - 1])) {
      throw Error(ErrorCode::InvalidConfig, "grid must be strictly increasing");
    }
    if (spec.grid[k] == 0.0) ++zeros;
  }
  if (zeros != 1) throw Error(ErrorCode::InvalidConfig, "grid must contain 0");
}

double influence_kernel(SmoothnessClass order, double x, double u) {
  const bool second = order == SmoothnessClass::LipschitzSecondDeriv;
  if (x > 0.0 && u >= 0.0 && u <= x) {
    const double d = x - u;
    return second ? 0.5 * d * d : d;
  }
  if (x < 0.0 && u <= 0.0 && u >= x) {
    const double d = x - u;
    return second ? -0.5 * d * d : -d;
  }
  return 0.0;
}

double influence_kernel_top_derivative(SmoothnessClass order, double x, double u) {
  const bool second = order == SmoothnessClass::LipschitzSecondDeriv;
  if (x > 0.0 && u >= 0.0 && u < x) return second ? 1.0 : -1.0;
  if (x < 0.0 && u <= 0.0 && u > x) return second ? -1.0 : 1.0;
  return 0.0;
}

BiasKernel::BiasKernel(std::span<const double> gamma, const RddSample& sample, SmoothnessClass order)
    : gamma_(gamma.begin(), gamma.end()), order_(order) {
  if (gamma.size() != sample.size()) throw Error(ErrorCode::LengthMismatch, "gamma and sample differ in length");
  xc_.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) xc_[i] = sample.centered(i);
}

double BiasKernel::operator()(double u) const {
  double k = 0.0;
  for (std::size_t i = 0; i < xc_.size(); ++i) k += gamma_[i] * influence_kernel(order_, xc_[i], u);
  return k;
}

std::vector<double> BiasKernel::on_grid(std::span<const double> grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = (*this)(grid[k]);
  return out;
}

BiasKernel bias_kernel(std::span<const double> gamma, const RddSample& sample, const FunctionClassSpec& spec) {
  return BiasKernel(gamma, sample, spec.order);
}

std::vector<double> moment_features(SmoothnessClass order, CurvatureBranch branch, double xc, bool treated) {
  const double w = treated ? 1.0 : 0.0;
  std::vector<double> phi{w, 1.0 - w, w * xc, (1.0 - w) * xc};
  if (order == SmoothnessClass::LipschitzSecondDeriv) {
    if (branch == CurvatureBranch::SharedCurvature) {
      phi.push_back(xc * xc);
    } else {
      phi.push_back(w * xc * xc);
      phi.push_back((1.0 - w) * xc * xc);
    }
  }
  return phi;
}

std::vector<double> moment_targets(SmoothnessClass order, CurvatureBranch branch) {
  std::vector<double> d{1.0, -1.0, 0.0, 0.0};
  if (order == SmoothnessClass::LipschitzSecondDeriv) {
    d.push_back(0.0);
    if (branch == CurvatureBranch::DifferentCurvature) d.push_back(0.0);
  }
  return d;
}

double DualCertificate::rho_tilde(double x) const {
  const int side = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
  double r = 0.0;
  for (std::size_t k = 0; k < knot_u.size(); ++k) {
    if (knot_side[k] == side) r += knot_weight[k] * influence_kernel(order, x, knot_u[k]);
  }
  for (std::size_t k = 0; k < piece_v.size(); ++k) {
    if (piece_side[k] == side) r += piece_weight[k] * influence_kernel_top_derivative(order, x, piece_v[k]);
  }
  return r;
}

double DualCertificate::g_function(double x, bool treated) const {
  const std::vector<double> phi = moment_features(order, branch, x, treated);
  double g = rho_tilde(x);
  for (std::size_t j = 0; j < phi.size() && j < lambda_moments.size(); ++j) g += lambda_moments[j] * phi[j];
  return g;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// One side of the cutoff, described by distances from 0. sign is +1 for the
// treated half (u >= 0) and -1 for the control half (u <= 0).
struct Half {
  double sign = 1.0;
  std::vector<double> mags;            // sorted ascending, strictly positive
  std::vector<Eigen::Index> index;     // fold index of mags[k]
  std::vector<double> knots;           // ascending from 0
};

Half make_half(const RddSample& fold, const std::vector<double>& grid, double sign) {
  Half half;
  half.sign = sign;
  std::vector<std::pair<double, Eigen::Index>> pts;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    const double m = sign * fold.centered(i);
    if (m > 0.0) pts.emplace_back(m, static_cast<Eigen::Index>(i));
  }
  std::sort(pts.begin(), pts.end());
  for (const auto& [m, i] : pts) {
    half.mags.push_back(m);
    half.index.push_back(i);
  }
  for (double g : grid) {
    const double m = sign * g;
    if (m >= 0.0) half.knots.push_back(m);
  }
  std::sort(half.knots.begin(), half.knots.end());
  if (!half.mags.empty() && half.knots.back() < half.mags.back()) half.knots.push_back(half.mags.back());
  return half;
}

// Bookkeeping for one |K| bound: which inequality rows carry +K and -K.
struct BoundRows {
  double location = 0.0;
  int side = 1;
  Eigen::Index plus_row = -1;   // aux - K >= 0
  Eigen::Index minus_row = -1;  // aux + K >= 0
};

class ProblemBuilder {
 public:
  ProblemBuilder(const RddSample& fold, const FunctionClassSpec& spec, const MinimaxOptions& options)
      : fold_(fold), spec_(spec), options_(options), n_(static_cast<Eigen::Index>(fold.size())) {}

  void build(double b2_over_s2) {
    const bool second = spec_.order == SmoothnessClass::LipschitzSecondDeriv;
    for (double sign : {1.0, -1.0}) {
      const Half half = make_half(fold_, spec_.grid, sign);
      add_knot_bounds(half);
      if (second) add_remainder_bounds(half);
    }

    const Eigen::Index num_vars = next_var_ + 1;
    t_var_ = next_var_;
    // t - sum w e - sum c D >= 0
    for (const auto& [var, weight] : t_terms_) ineq_.emplace_back(ineq_rows_, var, -weight);
    ineq_.emplace_back(ineq_rows_, t_var_, 1.0);
    t_row_ = ineq_rows_++;

    problem_.hessian_diag = Eigen::VectorXd::Constant(num_vars, 2.0 * options_.aux_regularization);
    problem_.hessian_diag.head(n_).setConstant(2.0);
    problem_.hessian_diag(t_var_) = 2.0 * b2_over_s2;
    problem_.linear = Eigen::VectorXd::Zero(num_vars);

    const std::vector<double> targets = moment_targets(spec_.order, spec_.branch);
    const auto meq = static_cast<Eigen::Index>(targets.size());
    std::vector<Triplet> eq;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const std::vector<double> phi = moment_features(spec_.order, spec_.branch, fold_.centered(idx), fold_.treated(idx));
      for (Eigen::Index j = 0; j < meq; ++j) {
        if (phi[static_cast<std::size_t>(j)] != 0.0) eq.emplace_back(j, i, phi[static_cast<std::size_t>(j)]);
      }
    }
    problem_.eq.resize(meq, num_vars);
    problem_.eq.setFromTriplets(eq.begin(), eq.end());
    problem_.eq_rhs = Eigen::Map<const Eigen::VectorXd>(targets.data(), meq);

    problem_.ineq.resize(ineq_rows_, num_vars);
    problem_.ineq.setFromTriplets(ineq_.begin(), ineq_.end());
    problem_.ineq_rhs = Eigen::VectorXd::Zero(ineq_rows_);
  }

  const qp::Problem& problem() const { return problem_; }
  Eigen::Index t_var() const { return t_var_; }
  Eigen::Index t_row() const { return t_row_; }
  const std::vector<BoundRows>& knot_rows() const { return knot_rows_; }
  const std::vector<BoundRows>& piece_rows() const { return piece_rows_; }

 private:
  // Adds aux >= +-row and returns the row bookkeeping.
  BoundRows add_abs_bound(Eigen::Index aux, const std::vector<std::pair<Eigen::Index, double>>& row, double location,
                          double sign) {
    BoundRows rows;
    rows.location = location;
    rows.side = sign > 0.0 ? 1 : -1;
    rows.plus_row = ineq_rows_++;
    rows.minus_row = ineq_rows_++;
    ineq_.emplace_back(rows.plus_row, aux, 1.0);
    ineq_.emplace_back(rows.minus_row, aux, 1.0);
    for (const auto& [i, v] : row) {
      ineq_.emplace_back(rows.plus_row, i, -v);
      ineq_.emplace_back(rows.minus_row, i, v);
    }
    return rows;
  }

  // Trapezoid weights on the knots; |K| at each knot bounded by its own variable.
  void add_knot_bounds(const Half& half) {
    const std::size_t nk = half.knots.size();
    std::vector<std::pair<Eigen::Index, double>> row;
    for (std::size_t j = 0; j < nk; ++j) {
      const double a = half.knots[j];
      double weight = 0.0;
      if (j > 0) weight += 0.5 * (a - half.knots[j - 1]);
      if (j + 1 < nk) weight += 0.5 * (half.knots[j + 1] - a);
      const double u = half.sign * a;
      row.clear();
      const auto first = std::upper_bound(half.mags.begin(), half.mags.end(), a) - half.mags.begin();
      for (auto k = static_cast<std::size_t>(first); k < half.mags.size(); ++k) {
        const Eigen::Index i = half.index[k];
        row.emplace_back(i, influence_kernel(spec_.order, fold_.centered(static_cast<std::size_t>(i)), u));
      }
      if (row.empty() || weight == 0.0) continue;
      const Eigen::Index aux = next_var_++;
      knot_rows_.push_back(add_abs_bound(aux, row, u, half.sign));
      t_terms_.emplace_back(aux, weight);
    }
  }

  // Interpolation remainder: on each cell of width h, integral |K| exceeds the
  // trapezoid by at most h^3/12 * sup|K''|. K'' is constant between
  // observations; its value beyond a point is +-(sum of gamma over the tail).
  void add_remainder_bounds(const Half& half) {
    const std::size_t cells = half.knots.size() - 1;
    const auto block = static_cast<std::size_t>(std::max(1, options_.remainder_block_cells));
    std::vector<std::pair<Eigen::Index, double>> row;
    for (std::size_t c0 = 0; c0 < cells; c0 += block) {
      const std::size_t c1 = std::min(cells, c0 + block);
      double weight = 0.0;
      for (std::size_t c = c0; c < c1; ++c) {
        const double h = half.knots[c + 1] - half.knots[c];
        weight += h * h * h / 12.0;
      }
      // Tail start positions: just above the block's left knot and just above
      // every observation strictly inside the block.
      const double a = half.knots[c0];
      const double b = half.knots[c1];
      const auto first = static_cast<std::size_t>(std::upper_bound(half.mags.begin(), half.mags.end(), a) - half.mags.begin());
      std::vector<std::size_t> starts;
      if (first < half.mags.size()) starts.push_back(first);
      for (std::size_t k = first; k < half.mags.size() && half.mags[k] < b; ++k) {
        const std::size_t s = static_cast<std::size_t>(
            std::upper_bound(half.mags.begin(), half.mags.end(), half.mags[k]) - half.mags.begin());
        if (s < half.mags.size() && s != starts.back()) starts.push_back(s);
      }
      if (starts.empty() || weight == 0.0) continue;

      const Eigen::Index aux = next_var_++;
      t_terms_.emplace_back(aux, weight);
      for (std::size_t s : starts) {
        const double prev = s > 0 ? half.mags[s - 1] : 0.0;
        const double v = half.sign * 0.5 * (prev + half.mags[s]);
        row.clear();
        for (std::size_t k = s; k < half.mags.size(); ++k) {
          const Eigen::Index i = half.index[k];
          row.emplace_back(i, influence_kernel_top_derivative(spec_.order, fold_.centered(static_cast<std::size_t>(i)), v));
        }
        piece_rows_.push_back(add_abs_bound(aux, row, v, half.sign));
      }
    }
  }

  const RddSample& fold_;
  const FunctionClassSpec& spec_;
  const MinimaxOptions& options_;
  Eigen::Index n_;
  Eigen::Index next_var_ = n_;
  Eigen::Index ineq_rows_ = 0;
  Eigen::Index t_var_ = -1;
  Eigen::Index t_row_ = -1;
  std::vector<Triplet> ineq_;
  std::vector<std::pair<Eigen::Index, double>> t_terms_;
  std::vector<BoundRows> knot_rows_;
  std::vector<BoundRows> piece_rows_;
  qp::Problem problem_;
};

void require_sides(const RddSample& fold) {
  std::vector<double> lo;
  std::vector<double> hi;
  for (std::size_t i = 0; i < fold.size(); ++i) (fold.treated(i) ? hi : lo).push_back(fold.centered(i));
  auto distinct = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  };
  if (distinct(lo) < 2 || distinct(hi) < 2) {
    throw Error(ErrorCode::Infeasible, "each side needs at least two distinct running-variable values");
  }
}

}  // namespace

MinimaxSolution solve_minimax(const RddSample& fold, double b_hat, double sigma2_hat,
                              const FunctionClassSpec& spec, const MinimaxOptions& options) {
  if (!(b_hat > 0.0) || !std::isfinite(b_hat)) throw Error(ErrorCode::InvalidConfig, "curvature bound must be positive");
  if (!(sigma2_hat > 0.0) || !std::isfinite(sigma2_hat)) {
    throw Error(ErrorCode::InvalidConfig, "noise variance must be positive");
  }
  check_function_class(spec);
  require_sides(fold);

  // The objective is divided by sigma^2 so the problem is invariant to the
  // outcome scale; multipliers are mapped back below.
  ProblemBuilder builder(fold, spec, options);
  builder.build(b_hat * b_hat / sigma2_hat);
  const qp::Problem& problem = builder.problem();

  const auto n = static_cast<Eigen::Index>(fold.size());
  qp::Options qopts;
  qopts.max_iterations = 10 * static_cast<int>(fold.size() + spec.grid.size());
  const qp::Solution sol = qp::solve(problem, qopts);
  switch (sol.status) {
    case qp::Status::Optimal: break;
    case qp::Status::Infeasible: throw Error(ErrorCode::Infeasible, "weight problem has no feasible point");
    case qp::Status::IterationLimit:
      throw Error(ErrorCode::SolverStall, "active-set iteration cap reached after " + std::to_string(sol.iterations));
    case qp::Status::Degenerate: throw Error(ErrorCode::NumericalBreakdown, "active-set factorization became singular");
  }
  const double kkt = qp::kkt_report(problem, sol).max();
  if (!(kkt <= options.kkt_tolerance)) {
    throw Error(ErrorCode::NumericalBreakdown, "KKT residual " + std::to_string(kkt) + " above tolerance");
  }

  MinimaxSolution out;
  out.gamma = sol.x.head(n);
  out.t_hat = sol.x(builder.t_var());
  out.objective = b_hat * b_hat * out.t_hat * out.t_hat + sigma2_hat * out.gamma.squaredNorm();
  out.equality_residuals = problem.eq.leftCols(n) * out.gamma - problem.eq_rhs;
  out.kkt_residual = kkt;
  out.iterations = sol.iterations;
  out.spec = spec;

  DualCertificate& cert = out.dual_certificate;
  cert.order = spec.order;
  cert.branch = spec.branch;
  cert.lambda_bias = sigma2_hat * sol.ineq_multipliers(builder.t_row());
  cert.lambda_moments.resize(static_cast<std::size_t>(sol.eq_multipliers.size()));
  for (Eigen::Index j = 0; j < sol.eq_multipliers.size(); ++j) {
    cert.lambda_moments[static_cast<std::size_t>(j)] = -sigma2_hat * sol.eq_multipliers(j);
  }
  auto collect = [&](const std::vector<BoundRows>& rows, std::vector<double>& loc, std::vector<double>& weight,
                     std::vector<int>& side) {
    for (const BoundRows& r : rows) {
      const double w = sigma2_hat * (sol.ineq_multipliers(r.plus_row) - sol.ineq_multipliers(r.minus_row));
      if (w == 0.0) continue;
      loc.push_back(r.location);
      weight.push_back(w);
      side.push_back(r.side);
    }
  };
  collect(builder.knot_rows(), cert.knot_u, cert.knot_weight, cert.knot_side);
  collect(builder.piece_rows(), cert.piece_v, cert.piece_weight, cert.piece_side);
  return out;
}

namespace {

// Integral over [0, h] of |c0 + c1 s + c2 s^2|.
double integrate_abs_quadratic(double c0, double c1, double c2, double h) {
  std::vector<double> cuts{0.0};
  auto add_root = [&](double r) {
    if (std::isfinite(r) && r > 0.0 && r < h) cuts.push_back(r);
  };
  if (c2 != 0.0) {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc > 0.0) {
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      add_root(q / c2);
      if (q != 0.0) add_root(c0 / q);
    }
  } else if (c1 != 0.0) {
    add_root(-c0 / c1);
  }
  cuts.push_back(h);
  std::sort(cuts.begin(), cuts.end());
  auto antiderivative = [&](double s) { return s * (c0 + s * (c1 / 2.0 + s * c2 / 3.0)); };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += std::abs(antiderivative(cuts[k + 1]) - antiderivative(cuts[k]));
  }
  return total;
}

// Integral of |K| over one half, with K written through tail sums of
// gamma x^k over the observations beyond each cell.
double half_integral(const std::vector<double>& knots, const std::vector<double>& xs,
                     const std::vector<double>& gs, SmoothnessClass order, double sign) {
  // xs sorted by distance from 0 (ascending), all on this half.
  const std::size_t m = xs.size();
  std::vector<double> s0(m + 1, 0.0), s1(m + 1, 0.0), s2(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    s0[k] = s0[k + 1] + gs[k];
    s1[k] = s1[k + 1] + gs[k] * xs[k];
    s2[k] = s2[k + 1] + gs[k] * xs[k] * xs[k];
  }
  double total = 0.0;
  std::size_t tail = 0;
  for (std::size_t c = 0; c + 1 < knots.size(); ++c) {
    // Cell between distances knots[c] and knots[c+1]; u runs from a to b.
    const double da = knots[c];
    const double db = knots[c + 1];
    while (tail < m && std::abs(xs[tail]) < db) ++tail;
    if (tail == m) break;
    const double a = sign * da;
    const double h = db - da;
    // Local coordinate s = |u| - da, u = a + sign * s.
    double c0, c1, c2;
    if (order == SmoothnessClass::LipschitzSecondDeriv) {
      // Treated half: K(u) = (S2 - 2 u S1 + u^2 S0) / 2; control half negated.
      const double k0 = 0.5 * (s2[tail] - 2.0 * a * s1[tail] + a * a * s0[tail]);
      const double k1 = -s1[tail] + a * s0[tail];
      c0 = sign * k0;
      c1 = sign * k1 * sign;
      c2 = sign * 0.5 * s0[tail];
    } else {
      // Treated half: K(u) = S1 - u S0; control half: u S0 - S1.
      c0 = sign * (s1[tail] - a * s0[tail]);
      c1 = -s0[tail];
      c2 = 0.0;
    }
    total += integrate_abs_quadratic(c0, c1, c2, h);
  }
  return total;
}

}  // namespace

double worst_case_bias_oracle(std::span<const double> gamma, const RddSample& sample,
                              const FunctionClassSpec& spec, int fine_grid) {
  if (gamma.size() != sample.size()) throw Error(ErrorCode::LengthMismatch, "gamma and sample differ in length");
  if (fine_grid <= 0) fine_grid = 10 * static_cast<int>(spec.grid.size());

  double lo = spec.grid.empty() ? 0.0 : std::min(0.0, spec.grid.front());
  double hi = spec.grid.empty() ? 0.0 : std::max(0.0, spec.grid.back());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    lo = std::min(lo, sample.centered(i));
    hi = std::max(hi, sample.centered(i));
  }
  std::vector<double> knots{0.0};
  for (int k = 0; k < fine_grid; ++k) knots.push_back(lo + (hi - lo) * k / std::max(1, fine_grid - 1));
  for (std::size_t i = 0; i < sample.size(); ++i) knots.push_back(sample.centered(i));

  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    std::vector<double> half_knots;
    for (double k : knots) {
      if (sign * k >= 0.0) half_knots.push_back(sign * k);
    }
    std::sort(half_knots.begin(), half_knots.end());
    half_knots.erase(std::unique(half_knots.begin(), half_knots.end()), half_knots.end());

    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double xc = sample.centered(i);
      if (sign * xc > 0.0) pts.emplace_back(xc, gamma[i]);
    }
    std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return std::abs(l.first) < std::abs(r.first); });
    std::vector<double> xs, gs;
    for (const auto& [x, g] : pts) {
      xs.push_back(x);
      gs.push_back(g);
    }
    total += half_integral(half_knots, xs, gs, spec.order, sign);
  }
  return total;
}

RecoveredPrimal recover_primal_from_dual(const DualCertificate& certificate, const RddSample& fold,
                                         double sigma2_hat, double b_hat,
                                         const Eigen::VectorXd& solver_gamma, double tolerance) {
  RecoveredPrimal rec;
  const auto n = static_cast<Eigen::Index>(fold.size());
  rec.gamma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    rec.gamma(i) = -certificate.g_function(fold.centered(idx), fold.treated(idx)) / (2.0 * sigma2_hat);
  }
  rec.t = certificate.lambda_bias / (2.0 * b_hat * b_hat);
  if (solver_gamma.size() != n) throw Error(ErrorCode::LengthMismatch, "solver gamma has the wrong length");
  const double scale = solver_gamma.cwiseAbs().maxCoeff();
  rec.mismatch = (rec.gamma - solver_gamma).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
  if (!(rec.mismatch <= tolerance)) {
    throw Error(ErrorCode::CertificateMismatch,
                "dual reconstruction differs from the primal weights by " + std::to_string(rec.mismatch));
  }
  return rec;
}

void write_weights_csv(std::ostream& out, std::span<const double> x, std::span<const int> treated,
                       std::span<const double> gamma) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  out << "x,w,gamma\n";
  char buf[96];
  for (std::size_t i : order) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", x[i], treated[i], gamma[i]);
    out << buf;
  }
}

}  // namespace plrd
