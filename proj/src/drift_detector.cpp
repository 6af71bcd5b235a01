#include "dsscn/drift_detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dsscn {

std::string to_string(DriftStatus status) {
  switch (status) {
    case DriftStatus::Stable: return "STABLE";
    case DriftStatus::Warning: return "WARNING";
    case DriftStatus::Drift: return "DRIFT";
  }
  return "?";
}

void DriftConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("drift tau must be positive");
  if (!(alpha_min_drift > 0.0 && alpha_min_drift < alpha_min_warning && alpha_min_warning < 1.0)) {
    throw std::invalid_argument("need 0 < alpha_min_drift < alpha_min_warning < 1");
  }
}

double hoeffding_bound(double a, double b, double n, double cut, double alpha) {
  if (b < a) throw std::invalid_argument("hoeffding_bound: b < a");
  if (!(cut > 0.0 && cut < n)) throw std::invalid_argument("hoeffding_bound: cut outside (0, n)");
  if (alpha >= 1.0) throw std::invalid_argument("hoeffding_bound: alpha >= 1");
  if (alpha <= 0.0) return std::numeric_limits<double>::infinity();
  const double rest = n - cut;
  return (b - a) * std::sqrt(rest / (2.0 * cut * rest) * std::log(1.0 / alpha));
}

std::pair<double, double> significance_schedule(double t, const DriftConfig& cfg) {
  const double ramp = 1.0 - std::exp(-std::max(0.0, t) / cfg.tau);
  return {std::min(ramp, cfg.alpha_min_drift), std::min(ramp, cfg.alpha_min_warning)};
}

namespace {

std::pair<double, double> range_of(std::span<const double> series) {
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  return {*lo, *hi};
}

}  // namespace

std::optional<std::size_t> find_cut(std::span<const double> series, double alpha) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("find_cut needs at least two values");
  if (alpha <= 0.0) return std::nullopt;
  const auto [a, b] = range_of(series);
  if (a == b) return 1;  // every prefix ties; take the first
  const double dn = static_cast<double>(n);

  std::optional<std::size_t> best;
  double best_bound = std::numeric_limits<double>::infinity();
  double prefix = 0.0;
  for (std::size_t c = 1; c < n; ++c) {
    prefix += series[c - 1];
    const double dc = static_cast<double>(c);
    const double bound = prefix / dc + hoeffding_bound(a, b, dn, dc, alpha);
    if (bound < best_bound) {
      best_bound = bound;
      best = c;
    }
  }
  return best;
}

DriftVerdict detect(std::span<const double> series, double t, const DriftConfig& cfg) {
  if (std::any_of(series.begin(), series.end(), [](double v) { return std::isnan(v); })) {
    throw std::invalid_argument("detect: NaN in monitored series");
  }
  DriftVerdict v;
  std::tie(v.alpha_drift, v.alpha_warning) = significance_schedule(t, cfg);
  v.eps_drift = std::numeric_limits<double>::infinity();
  v.eps_warning = std::numeric_limits<double>::infinity();
  if (series.size() < 2 || v.alpha_drift <= 0.0) return v;

  const auto [a, b] = range_of(series);
  if (a == b) return v;

  v.cut = find_cut(series, v.alpha_drift);
  if (!v.cut) return v;

  const std::size_t n = series.size();
  const std::size_t c = *v.cut;
  const double head = std::accumulate(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(c), 0.0);
  const double tail = std::accumulate(series.begin() + static_cast<std::ptrdiff_t>(c), series.end(), 0.0);
  const double mean1 = head / static_cast<double>(c);
  const double mean2 = tail / static_cast<double>(n - c);
  v.dist = std::abs(mean1 - mean2);

  const double dn = static_cast<double>(n);
  const double effective = static_cast<double>(c) * static_cast<double>(n - c) / dn;
  v.eps_drift = hoeffding_bound(a, b, dn, effective, v.alpha_drift);
  v.eps_warning = hoeffding_bound(a, b, dn, effective, v.alpha_warning);

  if (v.dist >= v.eps_drift) {
    v.status = DriftStatus::Drift;
  } else if (v.dist >= v.eps_warning) {
    v.status = DriftStatus::Warning;
  }
  return v;
}

DriftDetector::DriftDetector(DriftConfig cfg, std::size_t history_chunks)
    : cfg_(cfg), history_chunks_(std::max<std::size_t>(history_chunks, 1)) {
  cfg_.validate();
}

DriftVerdict DriftDetector::observe(std::span<const double> chunk_series) {
  history_.emplace_back(chunk_series.begin(), chunk_series.end());
  while (history_.size() > history_chunks_) history_.erase(history_.begin());

  std::vector<double> series;
  for (const auto& h : history_) series.insert(series.end(), h.begin(), h.end());

  DriftVerdict v = detect(series, static_cast<double>(seen_), cfg_);
  seen_ += chunk_series.size();
  if (v.status == DriftStatus::Drift) history_.clear();
  return v;
}

}  // namespace dsscn
