#include "dsscn/scn_init.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dsscn {

void ScnParams::validate() const {
  if (t_max < 1) throw std::invalid_argument("scn.t_max must be >= 1");
  if (scopes.empty()) throw std::invalid_argument("scn.scopes is empty");
  for (std::size_t k = 0; k < scopes.size(); ++k) {
    if (!(scopes[k] > 0.0)) throw std::invalid_argument("scn.scopes must be positive");
    if (k > 0 && !(scopes[k] > scopes[k - 1])) throw std::invalid_argument("scn.scopes must be strictly ascending");
  }
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("scn.r must lie in (0, 1)");
}

Eigen::MatrixXd sample_inverse_covariance(int n, double xi, std::mt19937_64& rng) {
  if (!(xi > 0.0)) throw std::invalid_argument("scope must be positive");
  std::uniform_real_distribution<double> off(-xi, xi);
  std::uniform_real_distribution<double> diag(0.0, xi);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) L(i, j) = off(rng);
    L(i, i) = xi - diag(rng);  // (0, xi]
  }
  Eigen::MatrixXd A = L * L.transpose() / xi;
  return 0.5 * (A + A.transpose());
}

double robustness(const Eigen::Ref<const Eigen::VectorXd>& g, const Eigen::Ref<const Eigen::VectorXd>& e,
                  double r, std::size_t nodes) {
  const double gg = g.squaredNorm();
  if (!(gg > 0.0)) throw std::invalid_argument("robustness: zero firing vector");
  const double mu = (1.0 - r) / static_cast<double>(nodes + 1);
  const double eg = e.dot(g);
  return eg * eg / gg - (1.0 - r - mu) * e.squaredNorm();
}

Eigen::VectorXd window_firing(const NodeGeometry& node, const Eigen::MatrixXd& window, double q) {
  Eigen::VectorXd g(window.rows());
  for (Eigen::Index t = 0; t < window.rows(); ++t) {
    g[t] = type_reduce(node_activation(node, window.row(t).transpose()), q);
  }
  return g;
}

std::uint64_t candidate_seed(std::uint64_t base, std::size_t scope_index, std::size_t k) {
  // splitmix64 finalizer over a packed counter
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (1 + (static_cast<std::uint64_t>(scope_index) << 32) +
                                                     static_cast<std::uint64_t>(k));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::pair<NodeGeometry, ScnOutcome> configure_node(const Eigen::Ref<const Eigen::VectorXd>& x_center,
                                                   const Eigen::VectorXd& spread,
                                                   const Eigen::MatrixXd& window,
                                                   const Eigen::MatrixXd& residuals, std::size_t nodes,
                                                   const ScnParams& params, double q, std::uint64_t seed) {
  params.validate();
  if (window.rows() == 0) throw std::invalid_argument("configure_node: empty window");
  if (residuals.rows() != window.rows()) throw std::invalid_argument("configure_node: residual rows mismatch");
  const int n = static_cast<int>(x_center.size());

  NodeGeometry geom;
  geom.c_lower = x_center - spread;
  geom.c_upper = x_center + spread;

  double r = params.r;
  std::mt19937_64 contraction_rng(candidate_seed(seed, params.scopes.size(), 0));

  ScnOutcome fallback;
  bool have_fallback = false;
  double fallback_total = -std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < params.scopes.size(); ++s) {
    const double xi = params.scopes[s];
    bool found = false;
    double best_total = -std::numeric_limits<double>::infinity();
    ScnOutcome best;

    for (int k = 0; k < params.t_max; ++k) {
      std::mt19937_64 rng(candidate_seed(seed, s, static_cast<std::size_t>(k)));
      geom.inv_cov = sample_inverse_covariance(n, xi, rng);
      const Eigen::VectorXd g = window_firing(geom, window, q);
      if (!(g.squaredNorm() > 0.0)) {
        if (!have_fallback) {
          fallback = {geom.inv_cov, xi, -std::numeric_limits<double>::infinity(), false, r};
          have_fallback = true;
        }
        continue;
      }
      double total = 0.0;
      double lowest = std::numeric_limits<double>::infinity();
      for (Eigen::Index o = 0; o < residuals.cols(); ++o) {
        const double z = robustness(g, residuals.col(o), r, nodes);
        total += z;
        lowest = std::min(lowest, z);
      }
      if (total > fallback_total) {
        fallback_total = total;
        fallback = {geom.inv_cov, xi, total, false, r};
        have_fallback = true;
      }
      if (lowest >= 0.0 && total > best_total) {
        best_total = total;
        best = {geom.inv_cov, xi, total, true, r};
        found = true;
      }
    }

    if (found) {
      geom.inv_cov = best.inv_cov;
      return {geom, best};
    }
    std::uniform_real_distribution<double> step(0.0, 1.0 - r);
    r = std::min(r + step(contraction_rng), 0.999);
  }

  geom.inv_cov = fallback.inv_cov;
  return {geom, fallback};
}

}  // namespace dsscn
