#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dsscn {

enum class DriftStatus { Stable, Warning, Drift };

std::string to_string(DriftStatus status);

struct DriftConfig {
  /// Time constant of the significance ramp, in samples.
  double tau = 50000.0;
  double alpha_min_drift = 0.09;
  double alpha_min_warning = 0.1;

  /// Throws std::invalid_argument unless 0 < drift < warning < 1 and tau > 0.
  void validate() const;
};

struct DriftVerdict {
  DriftStatus status = DriftStatus::Stable;
  std::optional<std::size_t> cut;  // size of the leading partition
  double dist = 0.0;
  double eps_drift = 0.0;
  double eps_warning = 0.0;
  double alpha_drift = 0.0;
  double alpha_warning = 0.0;
};

/// Hoeffding deviation bound for a partition of size `cut` out of `n` samples
/// in [a, b]:  (b - a) * sqrt((n - cut) / (2 cut (n - cut)) * ln(1/alpha)).
/// Returns +infinity when alpha <= 0. `cut` may be fractional (an effective
/// sample count). Throws std::invalid_argument when b < a, cut outside (0, n)
/// or alpha >= 1.
double hoeffding_bound(double a, double b, double n, double cut, double alpha);

/// (alpha_drift, alpha_warning) after t samples:
/// min(1 - exp(-t / tau), alpha_min) for each level.
std::pair<double, double> significance_schedule(double t, const DriftConfig& cfg);

/// Cut point of a series: the prefix length c in [1, n-1] whose upper bound
/// mean(series[0..c)) + eps(c) is smallest (first one on ties). eps uses the
/// range of the whole series and `alpha`. Empty when the bound is undefined.
/// Throws std::invalid_argument for series shorter than 2.
std::optional<std::size_t> find_cut(std::span<const double> series, double alpha);

/// Three-state verdict for a monitored series after t samples. Pure function.
/// Z1 = series[0..cut), Z2 = series[cut..n); the drift and warning thresholds
/// are hoeffding_bound evaluated at the two-sample effective count
/// cut (n - cut) / n. Throws std::invalid_argument on NaN.
DriftVerdict detect(std::span<const double> series, double t, const DriftConfig& cfg);

/// Stateful wrapper feeding `detect` with the monitored series accumulated
/// since the last drift. One per stack.
class DriftDetector {
 public:
  DriftDetector() = default;
  DriftDetector(DriftConfig cfg, std::size_t history_chunks);

  /// Appends the chunk's series, evaluates, then advances t by the chunk size.
  /// History is cleared after a DRIFT verdict.
  DriftVerdict observe(std::span<const double> chunk_series);

  /// Advances the sample counter without evaluating (first chunk, training only).
  void advance(std::size_t samples) { seen_ += samples; }

  const DriftConfig& config() const { return cfg_; }
  void set_config(const DriftConfig& cfg) { cfg_ = cfg; }
  std::uint64_t seen() const { return seen_; }
  std::size_t history_chunks() const { return history_chunks_; }
  const std::vector<std::vector<double>>& history() const { return history_; }

  void restore(std::uint64_t seen, std::vector<std::vector<double>> history) {
    seen_ = seen;
    history_ = std::move(history);
  }

 private:
  DriftConfig cfg_;
  std::size_t history_chunks_ = 100;
  std::uint64_t seen_ = 0;
  std::vector<std::vector<double>> history_;
};

}  // namespace dsscn
