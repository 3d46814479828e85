#include "plrd/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plrd::qp {

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::IterationLimit: return "iteration-limit";
    case Status::Degenerate: return "degenerate";
  }
  return "unknown";
}

double KktReport::max() const {
  return std::max({stationarity, primal_infeasibility, dual_infeasibility, complementarity});
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rotates columns (a, b) of `m` so that  col_a <- c a + s b,  col_b <- -s a + c b.
inline void rotate_columns(Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b, double c, double s) {
  const Eigen::Index rows = m.rows();
  double* pa = m.col(a).data();
  double* pb = m.col(b).data();
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double va = pa[k];
    const double vb = pb[k];
    pa[k] = c * va + s * vb;
    pb[k] = -s * va + c * vb;
  }
}

class GoldfarbIdnani {
 public:
  GoldfarbIdnani(const Problem& problem, const Options& options)
      : prob_(problem),
        opts_(options),
        n_(problem.num_vars()),
        meq_(problem.eq.rows()),
        m_(problem.ineq.rows()) {
    if (problem.linear.size() != n_ || problem.eq.cols() != n_ || problem.ineq.cols() != n_ ||
        problem.eq_rhs.size() != meq_ || problem.ineq_rhs.size() != m_) {
      throw std::invalid_argument("qp::solve: inconsistent problem dimensions");
    }
    if ((problem.hessian_diag.array() <= 0.0).any()) {
      throw std::invalid_argument("qp::solve: Hessian diagonal must be strictly positive");
    }
    J_ = Eigen::MatrixXd::Zero(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i) J_(i, i) = 1.0 / std::sqrt(problem.hessian_diag(i));
    R_ = Eigen::MatrixXd::Zero(n_, n_);
    x_ = -problem.linear.cwiseQuotient(problem.hessian_diag);
    u_ = Eigen::VectorXd::Zero(n_);
    active_.reserve(static_cast<std::size_t>(n_));
    d_.resize(n_);
    z_.resize(n_);
    r_.resize(n_);
    inactive_.assign(static_cast<std::size_t>(m_), true);
    row_scale_.resize(m_);
    for (Eigen::Index j = 0; j < m_; ++j) {
      const double norm = problem.ineq.row(j).norm();
      row_scale_(j) = norm > 0.0 ? 1.0 / norm : 0.0;
    }
  }

  Solution run() {
    Solution sol;
    sol.status = add_equalities();
    if (sol.status == Status::Optimal) sol.status = main_loop();
    sol.iterations = iterations_;
    sol.x = x_;
    sol.objective = 0.5 * x_.dot(prob_.hessian_diag.cwiseProduct(x_)) + prob_.linear.dot(x_);
    sol.eq_multipliers = Eigen::VectorXd::Zero(meq_);
    sol.ineq_multipliers = Eigen::VectorXd::Zero(m_);
    for (Eigen::Index k = 0; k < q_; ++k) {
      const Eigen::Index id = active_[static_cast<std::size_t>(k)];
      if (id < meq_) {
        sol.eq_multipliers(id) = u_(k);
      } else {
        sol.ineq_multipliers(id - meq_) = u_(k);
        sol.active_ineq.push_back(static_cast<int>(id - meq_));
      }
    }
    std::sort(sol.active_ineq.begin(), sol.active_ineq.end());
    return sol;
  }

 private:
  // d = J' n for the sparse constraint row n.
  template <typename Row>
  void compute_d(const Row& row) {
    d_.setZero();
    for (typename Row::InnerIterator it(row, 0); it; ++it) {
      d_.noalias() += it.value() * J_.row(it.index()).transpose();
    }
  }

  // Primal step direction z = J2 d2 and dual direction r = R^-1 d1.
  void compute_directions() {
    const Eigen::Index free = n_ - q_;
    if (free > 0) {
      z_.noalias() = J_.rightCols(free) * d_.tail(free);
    } else {
      z_.setZero();
    }
    if (q_ > 0) {
      r_.head(q_) = R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d_.head(q_));
    }
  }

  // Squared norm of d2 = n' z; zero when n lies in the span of the active normals.
  double curvature_along_z() const {
    const Eigen::Index free = n_ - q_;
    return free > 0 ? d_.tail(free).squaredNorm() : 0.0;
  }

  bool dependent(double zn) const { return zn <= 1e-26 * d_.squaredNorm(); }

  bool add_constraint(Eigen::Index id) {
    for (Eigen::Index j = n_ - 1; j >= q_ + 1; --j) {
      const double b = d_(j);
      if (b == 0.0) continue;
      const double a = d_(j - 1);
      const double h = std::hypot(a, b);
      const double c = a / h;
      const double s = b / h;
      d_(j - 1) = h;
      d_(j) = 0.0;
      rotate_columns(J_, j - 1, j, c, s);
    }
    R_.col(q_).head(q_ + 1) = d_.head(q_ + 1);
    active_.push_back(id);
    ++q_;
    const double diag = std::abs(d_(q_ - 1));
    if (diag <= std::numeric_limits<double>::epsilon() * r_norm_) return false;
    r_norm_ = std::max(r_norm_, diag);
    return true;
  }

  void drop_constraint(Eigen::Index pos) {
    const Eigen::Index id = active_[static_cast<std::size_t>(pos)];
    if (id >= meq_) inactive_[static_cast<std::size_t>(id - meq_)] = true;
    for (Eigen::Index k = pos; k < q_ - 1; ++k) {
      active_[static_cast<std::size_t>(k)] = active_[static_cast<std::size_t>(k + 1)];
      u_(k) = u_(k + 1);
      R_.col(k).head(k + 2) = R_.col(k + 1).head(k + 2);
    }
    active_.pop_back();
    R_.col(q_ - 1).setZero();
    u_(q_ - 1) = 0.0;
    --q_;
    // Columns pos..q-1 are now upper Hessenberg; restore triangularity.
    for (Eigen::Index j = pos; j < q_; ++j) {
      const double a = R_(j, j);
      const double b = R_(j + 1, j);
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h;
      const double s = b / h;
      for (Eigen::Index k = j; k < q_; ++k) {
        const double ra = R_(j, k);
        const double rb = R_(j + 1, k);
        R_(j, k) = c * ra + s * rb;
        R_(j + 1, k) = -s * ra + c * rb;
      }
      R_(j + 1, j) = 0.0;
      rotate_columns(J_, j, j + 1, c, s);
    }
  }

  Status add_equalities() {
    for (Eigen::Index i = 0; i < meq_; ++i) {
      const auto row = prob_.eq.row(i);
      compute_d(row);
      compute_directions();
      const double zn = curvature_along_z();
      const double residual = row.dot(x_) - prob_.eq_rhs(i);
      if (dependent(zn)) {
        if (std::abs(residual) > 1e-10 * (1.0 + std::abs(prob_.eq_rhs(i)))) return Status::Infeasible;
        continue;
      }
      const double t = -residual / zn;
      x_.noalias() += t * z_;
      if (q_ > 0) u_.head(q_).noalias() -= t * r_.head(q_);
      if (!add_constraint(i)) return Status::Degenerate;
      u_(q_ - 1) = t;
    }
    meq_active_ = q_;
    return Status::Optimal;
  }

  Status main_loop() {
    Eigen::VectorXd slack = prob_.ineq * x_ - prob_.ineq_rhs;
    Eigen::VectorXd cz(m_);

    while (true) {
      // Most violated inactive constraint, by normalized slack.
      Eigen::Index p = -1;
      double worst = -opts_.feasibility_tol;
      for (Eigen::Index j = 0; j < m_; ++j) {
        if (!inactive_[static_cast<std::size_t>(j)]) continue;
        const double v = slack(j) * row_scale_(j);
        if (v < worst) {
          worst = v;
          p = j;
        }
      }
      if (p < 0) return Status::Optimal;

      const auto row = prob_.ineq.row(p);
      double u_new = 0.0;
      while (true) {
        if (++iterations_ > opts_.max_iterations) return Status::IterationLimit;
        compute_d(row);
        compute_directions();
        const double zn = curvature_along_z();

        // Largest dual step keeping the active inequality multipliers >= 0.
        double t1 = kInf;
        Eigen::Index drop = -1;
        for (Eigen::Index k = meq_active_; k < q_; ++k) {
          if (r_(k) > 0.0) {
            const double ratio = u_(k) / r_(k);
            if (ratio < t1) {
              t1 = ratio;
              drop = k;
            }
          }
        }
        const double t2 = dependent(zn) ? kInf : -slack(p) / zn;

        if (t1 == kInf && t2 == kInf) return Status::Infeasible;
        if (t2 == kInf) {
          u_.head(q_).noalias() -= t1 * r_.head(q_);
          u_new += t1;
          drop_constraint(drop);
          continue;
        }

        const double t = std::min(t1, t2);
        x_.noalias() += t * z_;
        cz.noalias() = prob_.ineq * z_;
        slack.noalias() += t * cz;
        if (q_ > 0) u_.head(q_).noalias() -= t * r_.head(q_);
        u_new += t;

        if (t == t2) {
          if (!add_constraint(meq_ + p)) return Status::Degenerate;
          u_(q_ - 1) = u_new;
          inactive_[static_cast<std::size_t>(p)] = false;
          break;
        }
        drop_constraint(drop);
      }
    }
  }

  const Problem& prob_;
  Options opts_;
  Eigen::Index n_;
  Eigen::Index meq_;
  Eigen::Index m_;

  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  Eigen::VectorXd x_;
  Eigen::VectorXd u_;
  Eigen::VectorXd d_, z_, r_;
  Eigen::VectorXd row_scale_;
  std::vector<Eigen::Index> active_;
  std::vector<bool> inactive_;
  Eigen::Index q_ = 0;
  Eigen::Index meq_active_ = 0;
  double r_norm_ = 1.0;
  int iterations_ = 0;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  return GoldfarbIdnani(problem, options).run();
}

KktReport kkt_report(const Problem& problem, const Solution& solution) {
  KktReport rep;
  const Eigen::VectorXd& x = solution.x;
  const Eigen::VectorXd hx = problem.hessian_diag.cwiseProduct(x);
  const Eigen::VectorXd eq_force = problem.eq.transpose() * solution.eq_multipliers;
  const Eigen::VectorXd ineq_force = problem.ineq.transpose() * solution.ineq_multipliers;
  const Eigen::VectorXd grad = hx + problem.linear - eq_force - ineq_force;
  auto inf_norm = [](const Eigen::VectorXd& v) { return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0; };
  const double force = std::max({1.0, inf_norm(hx), inf_norm(problem.linear), inf_norm(eq_force), inf_norm(ineq_force)});
  const double mult = std::max(1.0, inf_norm(solution.ineq_multipliers));
  rep.stationarity = inf_norm(grad) / force;

  const Eigen::VectorXd eq_res = problem.eq * x - problem.eq_rhs;
  const Eigen::VectorXd slack = problem.ineq * x - problem.ineq_rhs;
  double primal = eq_res.size() > 0 ? eq_res.cwiseAbs().maxCoeff() : 0.0;
  double dual = 0.0;
  double comp = 0.0;
  for (Eigen::Index j = 0; j < slack.size(); ++j) {
    primal = std::max(primal, -slack(j));
    dual = std::max(dual, -solution.ineq_multipliers(j));
    comp = std::max(comp, std::abs(solution.ineq_multipliers(j) * slack(j)));
  }
  rep.primal_infeasibility = std::max(0.0, primal);
  rep.dual_infeasibility = dual / mult;
  rep.complementarity = comp / mult;
  return rep;
}

}  // namespace plrd::qp
