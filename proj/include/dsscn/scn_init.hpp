#pragma once

#include "dsscn/membership.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dsscn {

struct ScnParams {
  int t_max = 20;
  std::vector<double> scopes{0.1, 0.5, 1, 1.5, 2, 3, 5, 10, 30, 50, 100, 150, 200};
  double r = 0.9;

  /// Throws std::invalid_argument on t_max < 1, non-ascending or
  /// non-positive scopes, or r outside (0, 1).
  void validate() const;
};

struct ScnOutcome {
  Eigen::MatrixXd inv_cov;
  double scope_used = 0.0;
  double zeta_total = 0.0;
  bool satisfied = false;
  /// Contraction value in force when the candidate was accepted.
  double r_used = 0.0;
};

/// Random symmetric positive-definite matrix L L^T / xi, L lower triangular
/// with off-diagonal entries uniform on [-xi, xi] and diagonal on (0, xi].
Eigen::MatrixXd sample_inverse_covariance(int n, double xi, std::mt19937_64& rng);

/// Per-output supervisory value
///   (e^T g)^2 / (g^T g) - (1 - r - mu) e^T e,   mu = (1 - r) / (R + 1).
/// Throws std::invalid_argument when g is all zero.
double robustness(const Eigen::Ref<const Eigen::VectorXd>& g, const Eigen::Ref<const Eigen::VectorXd>& e,
                  double r, std::size_t nodes);

/// Crisp firing of a candidate node over every row of `window`.
Eigen::VectorXd window_firing(const NodeGeometry& node, const Eigen::MatrixXd& window, double q);

/// Seed for candidate k of scope s, independent of evaluation order.
std::uint64_t candidate_seed(std::uint64_t base, std::size_t scope_index, std::size_t k);

/// Stochastic configuration of a new node centred on `x_center`.
///
/// Scopes are tried in ascending order. Each draws t_max candidate inverse
/// covariances; candidates whose every per-output robustness is >= 0 are
/// admissible, and the first scope with an admissible candidate returns the
/// one with the largest summed robustness. After a failed scope r grows by a
/// uniform draw from (0, 1 - r), capped at 0.999. If no scope succeeds the
/// best candidate overall is returned with satisfied = false.
///
/// `residuals` is N x m (targets minus the current layer output over the
/// window); `nodes` is the node count before the addition.
std::pair<NodeGeometry, ScnOutcome> configure_node(const Eigen::Ref<const Eigen::VectorXd>& x_center,
                                                   const Eigen::VectorXd& spread,
                                                   const Eigen::MatrixXd& window,
                                                   const Eigen::MatrixXd& residuals, std::size_t nodes,
                                                   const ScnParams& params, double q, std::uint64_t seed);

}  // namespace dsscn
