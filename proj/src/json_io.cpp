#include "plrd/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace plrd {

namespace {

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // never "-0"
  out += buf;
}

void write(std::string& out, const Json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, item, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) out += ',';
        newline(depth + 1);
        write(out, v[k], indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

Json pair(const std::array<double, 2>& a) { return Json::array({a[0], a[1]}); }

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  write(out, value, indent, 0);
  return out;
}

Json to_json(const PlrdResult& r) {
  Json j;
  j["tau_hat"] = r.tau_hat;
  j["b_bound"] = r.b_bound;
  j["se_robust"] = r.se_robust;
  j["half_width"] = r.half_width;
  j["interval"] = pair(r.interval);
  j["branch"] = to_string(r.branch);
  j["b_hat_folds"] = pair(r.b_hat_folds);
  j["t_hat_folds"] = pair(r.t_hat_folds);
  j["lindeberg_ratio"] = r.lindeberg_ratio;
  j["n_used"] = r.n_used;
  j["n_total"] = r.n_total;
  j["alpha"] = r.alpha;
  j["epsilon_floor"] = r.epsilon_floor;
  j["kappa"] = r.kappa;

  Json anova;
  anova["f_stat"] = r.anova.f_stat;
  anova["df1"] = r.anova.df1;
  anova["df2"] = r.anova.df2;
  anova["p_value"] = r.anova.p_value;
  anova["reject"] = r.anova.reject;
  j["anova"] = anova;

  Json folds = Json::array();
  for (const FoldDiagnostics& f : r.folds) {
    Json d;
    d["size"] = f.size;
    d["sigma2_hat"] = f.sigma2_hat;
    d["b_hat_scaled"] = f.curvature.b_hat;
    d["beta3"] = pair(f.curvature.beta3);
    d["beta3_se"] = pair(f.curvature.beta3_se);
    d["epsilon_used"] = f.curvature.epsilon_used;
    d["t_hat_scaled"] = f.t_hat_scaled;
    d["objective"] = f.objective;
    d["max_equality_residual"] = f.max_equality_residual;
    d["kkt_residual"] = f.kkt_residual;
    d["certificate_mismatch"] = f.certificate_mismatch;
    d["iterations"] = f.iterations;
    folds.push_back(d);
  }
  j["folds"] = folds;
  return j;
}

}  // namespace plrd
