#include "dsscn/escn.hpp"

#include "dsscn/feature_weighting.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace dsscn {

void EscnConfig::validate() const {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("escn.q must lie in [0, 1]");
  if (!(omega > 0.0)) throw std::invalid_argument("escn.omega must be positive");
  if (!(rho_decay >= 0.0)) throw std::invalid_argument("escn.rho_decay must be >= 0");
  if (!(delta_c >= 0.0)) throw std::invalid_argument("escn.delta_c must be >= 0");
  if (!(p_b > 0.0 && p_b < 1.0)) throw std::invalid_argument("escn.p_b must lie in (0, 1)");
  if (!(theta_prune >= 0.0)) throw std::invalid_argument("escn.theta_prune must be >= 0");
  scn.validate();
}

void DensityStats::add(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (count == 0) {
    mean = Eigen::VectorXd::Zero(x.size());
  } else if (mean.size() != x.size()) {
    throw std::invalid_argument("DensityStats: dimension mismatch");
  }
  ++count;
  const Eigen::VectorXd d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d.dot(x - mean);
}

void DensityStats::merge(const DensityStats& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double total = na + nb;
  const Eigen::VectorXd d = other.mean - mean;
  mean += d * (nb / total);
  m2 += other.m2 + d.squaredNorm() * na * nb / total;
  count += other.count;
}

double DensityStats::density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (count == 0) throw std::logic_error("density queried before any sample");
  const double spread = std::max(0.0, m2 / static_cast<double>(count));
  return 1.0 / (1.0 + (x - mean).squaredNorm() + spread);
}

int predict_class(const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (y.size() == 0) throw std::invalid_argument("predict_class: empty output");
  if (y.size() == 1) return y[0] >= 0.5 ? 0 : 1;
  Eigen::Index best = 0;
  for (Eigen::Index o = 1; o < y.size(); ++o) {
    if (y[o] > y[best]) best = o;
  }
  return static_cast<int>(best);
}

void fwgrls_update(HiddenNode& node, const Eigen::Ref<const Eigen::VectorXd>& x_e, double lambda,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y, double rho_decay) {
  if (!(lambda > 0.0)) return;
  const Eigen::VectorXd ox = node.Omega * x_e;
  const double denom = 1.0 / lambda + x_e.dot(ox);
  const Eigen::VectorXd gain = ox / denom;
  node.Omega.noalias() -= gain * ox.transpose();
  node.Omega = 0.5 * (node.Omega + node.Omega.transpose()).eval();
  const Eigen::RowVectorXd err = y - x_e.transpose() * node.W;
  if (rho_decay > 0.0) node.W -= rho_decay * (node.Omega * node.W);
  node.W.noalias() += gain * err;
}

double replacement_threshold(double p_b, std::size_t n) {
  boost::math::chi_squared dist(static_cast<double>(n));
  return std::exp(-boost::math::quantile(dist, 1.0 - p_b));
}

EscnLayer::EscnLayer(std::size_t inputs, std::size_t outputs, EscnConfig cfg)
    : inputs_(inputs), outputs_(outputs), cfg_(std::move(cfg)) {
  if (inputs == 0 || outputs == 0) throw std::invalid_argument("EscnLayer needs inputs and outputs");
  cfg_.validate();
  q_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(outputs), cfg_.q);
  tau_b_ = replacement_threshold(cfg_.p_b, inputs);
}

void EscnLayer::set_q(Eigen::VectorXd q) {
  if (q.size() != static_cast<Eigen::Index>(outputs_)) throw std::invalid_argument("q: wrong length");
  if ((q.array() < 0.0).any() || (q.array() > 1.0).any()) throw std::invalid_argument("q outside [0, 1]");
  q_ = std::move(q);
}

double EscnLayer::crisp(const IntervalFiring& f) const { return type_reduce(f, q_.mean()); }

std::vector<IntervalFiring> EscnLayer::firings(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<IntervalFiring> f;
  f.reserve(nodes_.size());
  for (const auto& node : nodes_) f.push_back(node_activation(node.geom, x));
  return f;
}

Inference EscnLayer::infer(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Inference out;
  out.y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outputs_));
  if (nodes_.empty()) {
    out.no_coverage = true;
    return out;
  }
  const Eigen::VectorXd xe = chebyshev_expand(x);
  Eigen::VectorXd lower_sum = Eigen::VectorXd::Zero(out.y.size());
  Eigen::VectorXd upper_sum = Eigen::VectorXd::Zero(out.y.size());
  double denom = 0.0;
  for (const auto& node : nodes_) {
    const IntervalFiring f = node_activation(node.geom, x);
    denom += f.lower + f.upper;
    if (f.upper == 0.0) continue;
    const Eigen::VectorXd beta = node.W.transpose() * xe;
    lower_sum += f.lower * beta;
    upper_sum += f.upper * beta;
  }
  if (!(denom > 0.0)) {
    out.no_coverage = true;
    return out;
  }
  const Eigen::ArrayXd q = q_.array();
  out.y = ((1.0 - q) * lower_sum.array() + q * upper_sum.array()) / denom;
  return out;
}

Eigen::MatrixXd EscnLayer::infer_batch(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd Y(X.rows(), static_cast<Eigen::Index>(outputs_));
  for (Eigen::Index t = 0; t < X.rows(); ++t) Y.row(t) = infer(X.row(t).transpose()).y.transpose();
  return Y;
}

Eigen::MatrixXd EscnLayer::firing_matrix(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd F(X.rows(), static_cast<Eigen::Index>(nodes_.size()));
  for (Eigen::Index t = 0; t < X.rows(); ++t) {
    const Eigen::VectorXd x = X.row(t).transpose();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      F(t, static_cast<Eigen::Index>(i)) = crisp(node_activation(nodes_[i].geom, x));
    }
  }
  return F;
}

GrowDecision EscnLayer::grow_check(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  GrowDecision d;
  if (nodes_.empty()) {
    d.action = GrowAction::Add;
    return d;
  }
  const double dx = density_.density(x);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& node : nodes_) {
    const double dc = density_.density(node.geom.center());
    lo = std::min(lo, dc);
    hi = std::max(hi, dc);
  }
  if (!(dx > hi || dx < lo)) return d;

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double g = crisp(node_activation(nodes_[i].geom, x));
    if (g > d.nearest_firing || i == 0) {
      d.nearest_firing = g;
      d.nearest = i;
    }
  }
  d.action = d.nearest_firing >= tau_b_ ? GrowAction::Replace : GrowAction::Add;
  return d;
}

std::vector<std::size_t> EscnLayer::prune_check(const Eigen::MatrixXd& firing, const Eigen::MatrixXd& Y,
                                                std::size_t stamp) const {
  const std::size_t R = nodes_.size();
  std::vector<std::size_t> out;
  if (R < 2 || firing.rows() < 2) return out;
  if (firing.cols() != static_cast<Eigen::Index>(R) || Y.rows() != firing.rows()) {
    throw std::invalid_argument("prune_check: shape mismatch");
  }
  Eigen::VectorXd s(static_cast<Eigen::Index>(R));
  for (std::size_t i = 0; i < R; ++i) {
    double acc = 0.0;
    for (Eigen::Index o = 0; o < Y.cols(); ++o) acc += mici(firing.col(static_cast<Eigen::Index>(i)), Y.col(o));
    s[static_cast<Eigen::Index>(i)] = acc / static_cast<double>(Y.cols());
  }
  const double mean = s.mean();
  const double sd = std::sqrt((s.array() - mean).square().mean());
  if (!(sd > 0.0)) return out;
  const double limit = mean + cfg_.theta_prune * sd;
  for (std::size_t i = 0; i < R; ++i) {
    if (nodes_[i].birth_stamp < stamp && s[static_cast<Eigen::Index>(i)] > limit) out.push_back(i);
  }
  if (out.size() >= R) out.clear();
  return out;
}

void EscnLayer::remove_nodes(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end(), std::greater<>());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (std::size_t i : indices) {
    if (i >= nodes_.size()) throw std::out_of_range("remove_nodes: bad index");
    nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

LayerReport EscnLayer::train_chunk(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, std::size_t stamp,
                                   std::mt19937_64& rng) {
  if (X.cols() != static_cast<Eigen::Index>(inputs_) || Y.cols() != static_cast<Eigen::Index>(outputs_) ||
      X.rows() != Y.rows() || X.rows() == 0) {
    throw std::invalid_argument("train_chunk: shape mismatch");
  }
  LayerReport rep;
  const Eigen::Index N = X.rows();
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * inputs_ + 1);
  const Eigen::RowVectorXd mu = X.colwise().mean();
  const Eigen::VectorXd spread =
      cfg_.delta_c * ((X.rowwise() - mu).array().square().colwise().mean().sqrt()).transpose();

  std::size_t wrong = 0;
  std::vector<double> crisp_f;
  for (Eigen::Index t = 0; t < N; ++t) {
    const Eigen::VectorXd x = X.row(t).transpose();
    const Eigen::RowVectorXd y = Y.row(t);
    density_.add(x);

    Eigen::Index target = 0;
    y.maxCoeff(&target);
    if (predict_class(infer(x).y) != static_cast<int>(target)) ++wrong;

    const GrowDecision g = grow_check(x);
    if (g.action == GrowAction::Add) {
      const Eigen::MatrixXd residual = Y - infer_batch(X);
      auto [geom, outcome] = configure_node(x, spread, X, residual, nodes_.size(), cfg_.scn, q_.mean(), rng());
      HiddenNode node;
      node.geom = std::move(geom);
      node.W = nodes_.empty() ? Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(outputs_))
                              : nodes_[g.nearest].W;
      node.Omega = cfg_.omega * Eigen::MatrixXd::Identity(dim, dim);
      node.birth_stamp = stamp;
      rep.events.push_back({stamp, nodes_.size(), outcome.scope_used, outcome.zeta_total, outcome.satisfied});
      nodes_.push_back(std::move(node));
      ++rep.added;
    } else if (g.action == GrowAction::Replace) {
      auto& node = nodes_[g.nearest];
      node.geom.c_lower = x - spread;
      node.geom.c_upper = x + spread;
      ++rep.replaced;
    }

    crisp_f.resize(nodes_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      crisp_f[i] = crisp(node_activation(nodes_[i].geom, x));
      total += crisp_f[i];
    }
    if (!(total > 0.0)) continue;
    const Eigen::VectorXd xe = chebyshev_expand(x);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      fwgrls_update(nodes_[i], xe, crisp_f[i] / total, y, cfg_.rho_decay);
    }
  }

  const auto doomed = prune_check(firing_matrix(X), Y, stamp);
  rep.pruned = doomed.size();
  remove_nodes(doomed);

  rep.nodes = nodes_.size();
  rep.training_error = static_cast<double>(wrong) / static_cast<double>(N);
  return rep;
}

}  // namespace dsscn
