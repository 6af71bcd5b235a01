#include "dsscn/feature_weighting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsscn {

void PairStats::add(double x1, double x2) {
  ++count;
  const double n = static_cast<double>(count);
  const double d1 = x1 - mean1;
  const double d2 = x2 - mean2;
  mean1 += d1 / n;
  mean2 += d2 / n;
  m2_1 += d1 * (x1 - mean1);
  m2_2 += d2 * (x2 - mean2);
  // Both one-sided Welford forms are exact; averaging keeps the update symmetric.
  c12 += 0.5 * (d1 * (x2 - mean2) + d2 * (x1 - mean1));
}

void PairStats::merge(const PairStats& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(o.count);
  const double n = na + nb;
  const double d1 = o.mean1 - mean1;
  const double d2 = o.mean2 - mean2;
  m2_1 += o.m2_1 + d1 * d1 * na * nb / n;
  m2_2 += o.m2_2 + d2 * d2 * na * nb / n;
  c12 += o.c12 + d1 * d2 * na * nb / n;
  mean1 += d1 * nb / n;
  mean2 += d2 * nb / n;
  count += o.count;
}

double PairStats::var1() const { return count ? std::max(0.0, m2_1 / static_cast<double>(count)) : 0.0; }
double PairStats::var2() const { return count ? std::max(0.0, m2_2 / static_cast<double>(count)) : 0.0; }
double PairStats::cov() const { return count ? c12 / static_cast<double>(count) : 0.0; }

PairStats pair_stats(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pair_stats: length mismatch");
  PairStats s;
  for (Eigen::Index t = 0; t < a.size(); ++t) s.add(a[t], b[t]);
  return s;
}

std::optional<double> pearson(const PairStats& s) {
  if (s.count < 2) throw std::invalid_argument("pearson needs at least two samples");
  const double v1 = s.var1();
  const double v2 = s.var2();
  if (v1 <= 0.0 || v2 <= 0.0) return std::nullopt;
  return std::clamp(s.cov() / std::sqrt(v1 * v2), -1.0, 1.0);
}

double mici(const PairStats& s) {
  if (s.count < 2) throw std::invalid_argument("mici needs at least two samples");
  const double v1 = s.var1();
  const double v2 = s.var2();
  const auto rho = pearson(s);
  if (!rho) return 0.0;
  const double sum = v1 + v2;
  const double radicand = std::max(0.0, sum * sum - 4.0 * (v1 * v2) * (1.0 - *rho * *rho));
  return std::max(0.0, 0.5 * (sum - std::sqrt(radicand)));
}

double mici(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  return mici(pair_stats(a, b));
}

Eigen::VectorXd feature_scores(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() != gamma.cols()) throw std::invalid_argument("gamma matrix must be square");
  const Eigen::Index n = gamma.rows();
  if (n == 0) throw std::invalid_argument("gamma matrix is empty");
  if (n == 1) return Eigen::VectorXd::Ones(1);
  Eigen::VectorXd scores(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l != j) sum += gamma(j, l);
    }
    scores[j] = sum / static_cast<double>(n - 1);
  }
  return scores;
}

Eigen::VectorXd input_weights(const Eigen::VectorXd& scores) {
  if ((scores.array() < 0.0).any()) throw std::invalid_argument("scores must be non-negative");
  const double top = scores.size() ? scores.maxCoeff() : 0.0;
  if (top <= 0.0) return Eigen::VectorXd::Ones(scores.size());
  return scores / top;
}

FeatureWeighter::FeatureWeighter(std::size_t n)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      comoment_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))) {}

void FeatureWeighter::update(const Eigen::MatrixXd& X) {
  if (X.cols() != mean_.size()) throw std::invalid_argument("FeatureWeighter: feature count mismatch");
  for (Eigen::Index t = 0; t < X.rows(); ++t) {
    ++count_;
    const Eigen::VectorXd x = X.row(t).transpose();
    const Eigen::VectorXd before = x - mean_;
    mean_ += before / static_cast<double>(count_);
    const Eigen::VectorXd after = x - mean_;
    comoment_.noalias() += before * after.transpose();
  }
}

PairStats FeatureWeighter::pair(std::size_t j, std::size_t l) const {
  const auto a = static_cast<Eigen::Index>(j);
  const auto b = static_cast<Eigen::Index>(l);
  PairStats s;
  s.count = count_;
  s.mean1 = mean_[a];
  s.mean2 = mean_[b];
  s.m2_1 = comoment_(a, a);
  s.m2_2 = comoment_(b, b);
  // The rank-one update is asymmetric in rounding; average both halves.
  s.c12 = 0.5 * (comoment_(a, b) + comoment_(b, a));
  return s;
}

Eigen::MatrixXd FeatureWeighter::gamma() const {
  const Eigen::Index n = mean_.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  if (count_ < 2) return g;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = j + 1; l < n; ++l) {
      const double v = mici(pair(static_cast<std::size_t>(j), static_cast<std::size_t>(l)));
      g(j, l) = v;
      g(l, j) = v;
    }
  }
  return g;
}

Eigen::VectorXd FeatureWeighter::weights() const {
  if (count_ < 2) return Eigen::VectorXd::Ones(mean_.size());
  return input_weights(feature_scores(gamma()));
}

void FeatureWeighter::restore(std::uint64_t count, Eigen::VectorXd mean, Eigen::MatrixXd comoment) {
  count_ = count;
  mean_ = std::move(mean);
  comoment_ = std::move(comoment);
}

}  // namespace dsscn
