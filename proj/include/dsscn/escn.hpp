#pragma once

#include "dsscn/membership.hpp"
#include "dsscn/scn_init.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace dsscn {

struct EscnConfig {
  double q = 0.5;            // type-reduction coefficient, every output
  double omega = 1e5;        // initial output covariance scale
  double rho_decay = 1e-5;   // quadratic weight decay
  double delta_c = 0.05;     // centroid half-width, in per-feature chunk std
  double p_b = 0.05;         // critical level of the replacement test
  double theta_prune = 2.0;  // relevance outlier threshold, in std units
  ScnParams scn;

  void validate() const;
};

struct HiddenNode {
  NodeGeometry geom;
  Eigen::MatrixXd W;      // (2n+1) x m
  Eigen::MatrixXd Omega;  // (2n+1) x (2n+1)
  std::size_t birth_stamp = 0;
};

/// Recursive density accumulator: D(x) = 1 / (1 + mean_k |x - x_k|^2),
/// carried as a running mean and the summed squared deviation from it.
struct DensityStats {
  std::uint64_t count = 0;
  Eigen::VectorXd mean;
  double m2 = 0.0;

  void add(const Eigen::Ref<const Eigen::VectorXd>& x);
  void merge(const DensityStats& other);
  /// Throws std::logic_error before the first sample.
  double density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

enum class GrowAction { None, Add, Replace };

struct GrowDecision {
  GrowAction action = GrowAction::None;
  std::size_t nearest = 0;
  double nearest_firing = 0.0;
};

struct Inference {
  Eigen::VectorXd y;
  bool no_coverage = false;
};

struct ScnEvent {
  std::size_t stamp = 0;
  std::size_t nodes_before = 0;
  double scope = 0.0;
  double zeta_total = 0.0;
  bool satisfied = false;
};

struct LayerReport {
  std::size_t added = 0;
  std::size_t replaced = 0;
  std::size_t pruned = 0;
  std::size_t nodes = 0;
  double training_error = 0.0;  // fraction misclassified before each update
  std::vector<ScnEvent> events;
};

/// Argmax with ties to the lowest index. A single output is read as a binary
/// score: >= 0.5 gives class 0, otherwise class 1.
int predict_class(const Eigen::Ref<const Eigen::VectorXd>& y);

/// One fuzzily weighted recursive least-squares step on a node:
///   K = Omega x / (1/lambda + x^T Omega x)
///   Omega <- Omega - K x^T Omega
///   W <- W - rho Omega W + K (y - x^T W)
/// No-op when lambda <= 0.
void fwgrls_update(HiddenNode& node, const Eigen::Ref<const Eigen::VectorXd>& x_e, double lambda,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y, double rho_decay);

/// Firing threshold above which a growth candidate replaces its nearest node:
/// exp(-chi2 quantile at 1 - p_b with n degrees of freedom).
double replacement_threshold(double p_b, std::size_t n);

/// One base learner: interval type-2 Gaussian nodes with Chebyshev
/// functional-link consequents.
class EscnLayer {
 public:
  EscnLayer() = default;
  EscnLayer(std::size_t inputs, std::size_t outputs, EscnConfig cfg);

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  std::size_t size() const { return nodes_.size(); }
  const EscnConfig& config() const { return cfg_; }

  const std::vector<HiddenNode>& nodes() const { return nodes_; }
  std::vector<HiddenNode>& nodes() { return nodes_; }
  const Eigen::VectorXd& q() const { return q_; }
  void set_q(Eigen::VectorXd q);
  const DensityStats& density() const { return density_; }
  DensityStats& density() { return density_; }

  /// Crisp firing used for normalization, relevance and configuration.
  double crisp(const IntervalFiring& f) const;

  std::vector<IntervalFiring> firings(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Inference infer(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Row-wise inference; rows without coverage are zero.
  Eigen::MatrixXd infer_batch(const Eigen::MatrixXd& X) const;

  /// Growth decision for x; density stats must already include x.
  GrowDecision grow_check(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Nodes born before `stamp` whose relevance (mean MICI between crisp
  /// firing and each target column) is an upper outlier. Never returns every
  /// node. `firing` is N x R.
  std::vector<std::size_t> prune_check(const Eigen::MatrixXd& firing, const Eigen::MatrixXd& Y,
                                       std::size_t stamp) const;

  /// Crisp firing of every node over every row of X (N x R).
  Eigen::MatrixXd firing_matrix(const Eigen::MatrixXd& X) const;

  /// Single pass over a labeled chunk. X is the layer input (already weighted
  /// and shifted), Y the one-hot targets.
  LayerReport train_chunk(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, std::size_t stamp,
                          std::mt19937_64& rng);

  void remove_nodes(std::vector<std::size_t> indices);

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  EscnConfig cfg_;
  Eigen::VectorXd q_;
  double tau_b_ = 0.0;
  std::vector<HiddenNode> nodes_;
  DensityStats density_;
};

}  // namespace dsscn
