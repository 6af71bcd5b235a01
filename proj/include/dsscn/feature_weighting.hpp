#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace dsscn {

/// Running first and second moments of a pair of variables, kept in centered
/// (Welford) form. Merging two PairStats gives the stats of the concatenation.
/// Variances are population variances.
struct PairStats {
  std::uint64_t count = 0;
  double mean1 = 0.0;
  double mean2 = 0.0;
  double m2_1 = 0.0;  // sum of squared deviations
  double m2_2 = 0.0;
  double c12 = 0.0;   // sum of cross deviations

  void add(double x1, double x2);
  void merge(const PairStats& other);

  double var1() const;
  double var2() const;
  double cov() const;
};

/// Stats over two equal-length series.
PairStats pair_stats(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b);

/// Pearson correlation clamped to [-1, 1]. Empty when either variance is zero
/// (a constant feature). Throws std::invalid_argument when count < 2.
std::optional<double> pearson(const PairStats& s);

/// Maximal information compression index: the smallest eigenvalue of the 2x2
/// covariance matrix. Zero means the pair is linearly dependent; a constant
/// variable also gives zero. Throws std::invalid_argument when count < 2.
double mici(const PairStats& s);

/// MICI of two series.
double mici(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// Row means of a symmetric pairwise-MICI matrix, ignoring the diagonal.
/// A single feature scores 1.
Eigen::VectorXd feature_scores(const Eigen::MatrixXd& gamma);

/// Normalizes scores by their maximum; all ones when the maximum is zero.
Eigen::VectorXd input_weights(const Eigen::VectorXd& scores);

/// Whole-stream moment accumulator for n features and the weights derived
/// from it. Shared by every layer of a stack.
class FeatureWeighter {
 public:
  FeatureWeighter() = default;
  explicit FeatureWeighter(std::size_t n);

  void update(const Eigen::MatrixXd& X);

  /// Pairwise MICI over everything seen so far (zero diagonal).
  Eigen::MatrixXd gamma() const;
  /// Current weights; all ones until two samples have been seen.
  Eigen::VectorXd weights() const;

  std::size_t features() const { return static_cast<std::size_t>(mean_.size()); }
  std::uint64_t count() const { return count_; }
  PairStats pair(std::size_t j, std::size_t l) const;

  // Raw state, for snapshots.
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& comoment() const { return comoment_; }
  void restore(std::uint64_t count, Eigen::VectorXd mean, Eigen::MatrixXd comoment);

 private:
  std::uint64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd comoment_;
};

}  // namespace dsscn
