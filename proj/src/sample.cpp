#include "plrd/sample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "plrd/error.hpp"

namespace plrd {

std::size_t RddSample::count_treated() const {
  return static_cast<std::size_t>(
      std::count_if(x_.begin(), x_.end(), [c = cutoff_](double v) { return v >= c; }));
}

RddSample RddSample::subset(std::span<const std::size_t> indices) const {
  std::vector<double> xs, ys;
  xs.reserve(indices.size());
  ys.reserve(indices.size());
  for (std::size_t i : indices) {
    xs.push_back(x_[i]);
    ys.push_back(y_[i]);
  }
  return RddSample(std::move(xs), std::move(ys), cutoff_);
}

namespace {

void check_sides(const RddSample& sample, std::string_view context) {
  const std::size_t treated = sample.count_treated();
  const std::size_t control = sample.size() - treated;
  if (treated < kMinPerSide || control < kMinPerSide) {
    std::ostringstream msg;
    msg << context << ": need at least " << kMinPerSide << " observations per side, got "
        << control << " control and " << treated << " treated";
    throw Error(ErrorCode::EmptySide, msg.str());
  }
}

}  // namespace

const RddSample& validate(const RddSample& sample) {
  if (sample.x().size() != sample.y().size()) {
    throw Error(ErrorCode::LengthMismatch, "x has " + std::to_string(sample.x().size()) +
                                               " values but y has " +
                                               std::to_string(sample.y().size()));
  }
  if (!std::isfinite(sample.cutoff())) throw Error(ErrorCode::NonFinite, "cutoff is not finite");
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!std::isfinite(sample.x()[i]) || !std::isfinite(sample.y()[i])) {
      throw Error(ErrorCode::NonFinite, "observation " + std::to_string(i) + " is not finite");
    }
  }
  check_sides(sample, "sample");
  return sample;
}

std::vector<std::size_t> window_indices(const RddSample& sample, WindowHalfWidth ell) {
  std::vector<std::size_t> kept;
  kept.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!ell || std::abs(sample.centered(i)) <= *ell) kept.push_back(i);
  }
  return kept;
}

RddSample apply_window(const RddSample& sample, WindowHalfWidth ell) {
  if (ell && !(*ell > 0.0)) throw Error(ErrorCode::InvalidConfig, "window half-width must be > 0");
  if (!ell) return sample;
  const auto kept = window_indices(sample, ell);
  RddSample windowed = sample.subset(kept);
  check_sides(windowed, "window");
  return windowed;
}

ScaledSample rescale(const RddSample& sample) {
  double kappa = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) kappa = std::max(kappa, std::abs(sample.centered(i)));
  if (!(kappa > 0.0)) throw Error(ErrorCode::DegenerateX, "all running-variable values equal the cutoff");

  std::vector<double> xs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) xs[i] = sample.centered(i) / kappa;
  std::vector<double> ys(sample.y().begin(), sample.y().end());
  return ScaledSample{RddSample(std::move(xs), std::move(ys), 0.0), kappa, sample.cutoff()};
}

RddSample unscale(const ScaledSample& scaled) {
  const auto& s = scaled.sample;
  std::vector<double> xs(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) xs[i] = s.x()[i] * scaled.kappa + scaled.original_cutoff;
  std::vector<double> ys(s.y().begin(), s.y().end());
  return RddSample(std::move(xs), std::move(ys), scaled.original_cutoff);
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

void validate_config(const PlrdConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1), got " + std::to_string(config.alpha));
  }
  if (!(config.anova_alpha_prime > 0.0 && config.anova_alpha_prime < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "anova alpha' must lie in (0, 1)");
  }
  if (config.window_ell && !(*config.window_ell > 0.0 && std::isfinite(*config.window_ell))) {
    throw Error(ErrorCode::InvalidConfig, "window half-width must be a positive finite number");
  }
  if (config.epsilon_floor && !(*config.epsilon_floor >= 0.0 && std::isfinite(*config.epsilon_floor))) {
    throw Error(ErrorCode::InvalidConfig, "epsilon floor must be >= 0");
  }
  if (config.grid_points < 20) throw Error(ErrorCode::InvalidConfig, "grid_points must be >= 20");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "' as a number");
  }
  return value;
}

}  // namespace

RddSample read_csv(const std::string& path, double cutoff) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::ParseError, "'" + path + "' is empty");

  std::string_view header = lines.front();
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto names = split_fields(header);
  std::optional<std::size_t> x_col, y_col;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == "x") x_col = j;
    if (names[j] == "y") y_col = j;
  }
  if (!x_col || !y_col) throw Error(ErrorCode::ParseError, "header must contain columns 'x' and 'y'");

  std::vector<double> xs, ys;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto fields = split_fields(lines[k]);
    if (fields.size() != names.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(k + 1) + ": expected " +
                                             std::to_string(names.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    xs.push_back(parse_number(fields[*x_col], k + 1));
    ys.push_back(parse_number(fields[*y_col], k + 1));
  }
  return RddSample(std::move(xs), std::move(ys), cutoff);
}

}  // namespace plrd
