#pragma once

#include "dsscn/drift_detector.hpp"
#include "dsscn/escn.hpp"
#include "dsscn/feature_weighting.hpp"
#include "dsscn/stream_data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace dsscn {

struct StackConfig {
  double alpha = 0.5;          // random-shift constant
  double delta_merge = 1e-4;   // layer-merge threshold on output MICI
  bool feature_weighting = true;
  bool layer_pruning = true;
  double tau_chunks = 100.0;   // significance ramp, in chunks of the first size
  std::size_t history_chunks = 100;
  double alpha_min_drift = 0.09;
  double alpha_min_warning = 0.1;
  EscnConfig escn;

  void validate() const;
};

struct LayerLink {
  EscnLayer layer;
  Eigen::MatrixXd P;  // m x n, maps the predecessor's output into this layer's input
  std::size_t birth_stamp = 0;
};

/// Input of a stacked layer: lambda o X, plus alpha * Y_prev * P when a
/// predecessor exists.
Eigen::MatrixXd layer_input(const Eigen::MatrixXd& X, const Eigen::VectorXd& lambda,
                            const Eigen::MatrixXd* y_prev, const Eigen::MatrixXd* P, double alpha);

struct ForwardResult {
  std::vector<Eigen::MatrixXd> outputs;  // one N x m block per layer
  std::vector<int> classes;              // 0-based, from the deepest layer
  std::size_t no_coverage = 0;           // rows the deepest layer could not score
};

struct MergeEvent {
  std::size_t kept = 0;     // layer indices before removal
  std::size_t removed = 0;
  double similarity = 0.0;
};

struct ChunkReport {
  std::size_t stamp = 0;
  DriftVerdict verdict;
  bool layer_added = false;
  std::optional<MergeEvent> merge;
  std::size_t depth = 0;
  std::size_t nodes = 0;
  std::vector<std::size_t> layer_nodes;
  std::size_t trained_layer = 0;  // 1-based, 0 when nothing was trained
  LayerReport training;
  Eigen::VectorXd lambda;
};

class StackedNetwork {
 public:
  StackedNetwork() = default;
  StackedNetwork(std::size_t inputs, std::size_t outputs, StackConfig cfg, std::uint64_t seed);

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  std::size_t depth() const { return links_.size(); }
  std::size_t total_nodes() const;
  const StackConfig& config() const { return cfg_; }

  /// Throws std::logic_error on an empty stack.
  ForwardResult forward(const Eigen::MatrixXd& X) const;

  /// Per-layer outputs; merges at most one pair of layers born before
  /// `stamp` whose mean output MICI is <= delta_merge. The younger is removed.
  std::optional<MergeEvent> prune_layers(const std::vector<Eigen::MatrixXd>& outputs, std::size_t stamp);

  /// One training step of the orchestrator on a labeled chunk.
  ChunkReport process_chunk(const DataChunk& chunk);

  /// Appends a fresh empty layer with a new projection matrix.
  void add_layer(std::size_t stamp);

  const std::vector<LayerLink>& links() const { return links_; }
  std::vector<LayerLink>& links() { return links_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  void set_lambda(Eigen::VectorXd lambda) { lambda_ = std::move(lambda); }
  const FeatureWeighter& weighter() const { return weighter_; }
  FeatureWeighter& weighter() { return weighter_; }
  const DriftDetector& detector() const { return detector_; }
  DriftDetector& detector() { return detector_; }
  const std::optional<DataChunk>& buffer() const { return buffer_; }
  std::optional<DataChunk>& buffer() { return buffer_; }
  std::mt19937_64& rng() { return rng_; }
  const std::mt19937_64& rng() const { return rng_; }
  bool tau_fixed() const { return tau_fixed_; }
  void set_tau_fixed(bool fixed) { tau_fixed_ = fixed; }

 private:
  /// Inputs of layer `index` given the outputs of every layer before it.
  Eigen::MatrixXd input_for(std::size_t index, const Eigen::MatrixXd& X,
                            const std::vector<Eigen::MatrixXd>& outputs) const;

  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  StackConfig cfg_;
  std::vector<LayerLink> links_;
  Eigen::VectorXd lambda_;
  FeatureWeighter weighter_;
  DriftDetector detector_;
  std::optional<DataChunk> buffer_;
  std::mt19937_64 rng_;
  bool tau_fixed_ = false;
};

}  // namespace dsscn
