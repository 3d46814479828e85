#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plrd {

/// Sharp regression-discontinuity sample. Units at or above the cutoff are
/// treated: W = 1{x >= cutoff}.
class RddSample {
 public:
  RddSample() = default;
  RddSample(std::vector<double> x, std::vector<double> y, double cutoff)
      : x_(std::move(x)), y_(std::move(y)), cutoff_(cutoff) {}

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  double cutoff() const { return cutoff_; }
  std::size_t size() const { return x_.size(); }

  bool treated(std::size_t i) const { return x_[i] >= cutoff_; }
  /// x_i - c
  double centered(std::size_t i) const { return x_[i] - cutoff_; }

  std::size_t count_treated() const;
  std::size_t count_control() const { return size() - count_treated(); }

  /// Sub-sample restricted to `indices` (kept in the given order).
  RddSample subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  double cutoff_ = 0.0;
};

inline constexpr std::size_t kMinPerSide = 5;
inline constexpr std::size_t kMinSampleSize = 10;

/// Checks length, finiteness and per-side counts; returns the sample unchanged.
/// Throws Error{LengthMismatch | NonFinite | EmptySide}.
const RddSample& validate(const RddSample& sample);

/// Window half-width around the cutoff; std::nullopt keeps the full range.
using WindowHalfWidth = std::optional<double>;

/// Indices i with |x_i - c| <= ell, in ascending order.
std::vector<std::size_t> window_indices(const RddSample& sample, WindowHalfWidth ell);

/// Observations with |x_i - c| <= ell. Throws EmptySide when fewer than
/// kMinPerSide observations remain on either side.
RddSample apply_window(const RddSample& sample, WindowHalfWidth ell);

/// Running variable mapped to (x - c) / kappa, kappa = max |x - c|, so the
/// cutoff sits at 0 and x lies in [-1, 1]. Outcomes are untouched.
struct ScaledSample {
  RddSample sample;
  double kappa = 1.0;
  double original_cutoff = 0.0;
};

/// Throws DegenerateX when every x equals the cutoff.
ScaledSample rescale(const RddSample& sample);

RddSample unscale(const ScaledSample& scaled);

/// Third-derivative bounds carry x^-3 units.
inline double unscale_curvature(double b_scaled, double kappa) {
  return b_scaled / (kappa * kappa * kappa);
}
inline double scale_curvature(double b_original, double kappa) {
  return b_original * kappa * kappa * kappa;
}

/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> values);

struct PlrdConfig {
  double alpha = 0.05;
  WindowHalfWidth window_ell;             // full range by default
  std::optional<double> epsilon_floor;    // default SD[Y] / 100
  double anova_alpha_prime = 0.001;
  std::uint64_t split_seed = 0;
  int grid_points = 400;
};

/// Throws InvalidAlpha / InvalidConfig.
void validate_config(const PlrdConfig& config);

/// Reads a CSV with a header naming columns `x` and `y`. Any row with a missing
/// or unparsable field is an error (ParseError); a missing file is Io.
RddSample read_csv(const std::string& path, double cutoff);

}  // namespace plrd
