#include "dsscn/stacked_network.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace dsscn {

void StackConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("stack.alpha must be >= 0");
  if (!(delta_merge >= 0.0)) throw std::invalid_argument("stack.delta_merge must be >= 0");
  if (!(tau_chunks > 0.0)) throw std::invalid_argument("drift.tau_chunks must be positive");
  if (history_chunks == 0) throw std::invalid_argument("drift.history_chunks must be >= 1");
  DriftConfig d{1.0, alpha_min_drift, alpha_min_warning};
  d.validate();
  escn.validate();
}

Eigen::MatrixXd layer_input(const Eigen::MatrixXd& X, const Eigen::VectorXd& lambda,
                            const Eigen::MatrixXd* y_prev, const Eigen::MatrixXd* P, double alpha) {
  if (lambda.size() != X.cols()) throw std::invalid_argument("layer_input: lambda length");
  Eigen::MatrixXd in = X * lambda.asDiagonal();
  if (y_prev != nullptr) {
    if (P == nullptr) throw std::invalid_argument("layer_input: shift without projection");
    if (y_prev->rows() != X.rows() || P->rows() != y_prev->cols() || P->cols() != X.cols()) {
      throw std::invalid_argument("layer_input: shift dimensions");
    }
    in.noalias() += alpha * (*y_prev) * (*P);
  }
  return in;
}

StackedNetwork::StackedNetwork(std::size_t inputs, std::size_t outputs, StackConfig cfg, std::uint64_t seed)
    : inputs_(inputs),
      outputs_(outputs),
      cfg_(std::move(cfg)),
      lambda_(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(inputs))),
      weighter_(inputs),
      rng_(seed) {
  if (inputs == 0 || outputs == 0) throw std::invalid_argument("stack needs inputs and outputs");
  cfg_.validate();
  // tau is provisional until the first chunk fixes its size
  detector_ = DriftDetector(DriftConfig{cfg_.tau_chunks, cfg_.alpha_min_drift, cfg_.alpha_min_warning},
                            cfg_.history_chunks);
}

std::size_t StackedNetwork::total_nodes() const {
  std::size_t total = 0;
  for (const auto& l : links_) total += l.layer.size();
  return total;
}

void StackedNetwork::add_layer(std::size_t stamp) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LayerLink link{EscnLayer(inputs_, outputs_, cfg_.escn),
                 Eigen::MatrixXd(static_cast<Eigen::Index>(outputs_), static_cast<Eigen::Index>(inputs_)), stamp};
  for (Eigen::Index i = 0; i < link.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < link.P.cols(); ++j) link.P(i, j) = unit(rng_);
  }
  links_.push_back(std::move(link));
}

Eigen::MatrixXd StackedNetwork::input_for(std::size_t index, const Eigen::MatrixXd& X,
                                          const std::vector<Eigen::MatrixXd>& outputs) const {
  if (index == 0) return layer_input(X, lambda_, nullptr, nullptr, cfg_.alpha);
  return layer_input(X, lambda_, &outputs[index - 1], &links_[index].P, cfg_.alpha);
}

ForwardResult StackedNetwork::forward(const Eigen::MatrixXd& X) const {
  if (links_.empty()) throw std::logic_error("forward on an empty stack");
  if (X.cols() != static_cast<Eigen::Index>(inputs_)) throw std::invalid_argument("forward: feature count");
  ForwardResult r;
  r.outputs.reserve(links_.size());
  for (std::size_t d = 0; d < links_.size(); ++d) {
    r.outputs.push_back(links_[d].layer.infer_batch(input_for(d, X, r.outputs)));
  }
  const Eigen::MatrixXd& top = r.outputs.back();
  r.classes.resize(static_cast<std::size_t>(top.rows()));
  for (Eigen::Index t = 0; t < top.rows(); ++t) {
    const Eigen::VectorXd y = top.row(t).transpose();
    if ((y.array() == 0.0).all()) ++r.no_coverage;
    r.classes[static_cast<std::size_t>(t)] = predict_class(y);
  }
  return r;
}

std::optional<MergeEvent> StackedNetwork::prune_layers(const std::vector<Eigen::MatrixXd>& outputs,
                                                       std::size_t stamp) {
  if (outputs.size() < 2 || outputs[0].rows() < 2) return std::nullopt;
  const std::size_t D = std::min(outputs.size(), links_.size());
  for (std::size_t i = 0; i < D; ++i) {
    if (links_[i].birth_stamp >= stamp) continue;
    for (std::size_t k = i + 1; k < D; ++k) {
      if (links_[k].birth_stamp >= stamp) continue;
      double sim = 0.0;
      for (Eigen::Index o = 0; o < outputs[i].cols(); ++o) sim += mici(outputs[i].col(o), outputs[k].col(o));
      sim /= static_cast<double>(outputs[i].cols());
      if (sim <= cfg_.delta_merge) {
        const bool k_younger = links_[k].birth_stamp >= links_[i].birth_stamp;
        MergeEvent ev{k_younger ? i : k, k_younger ? k : i, sim};
        links_.erase(links_.begin() + static_cast<std::ptrdiff_t>(ev.removed));
        return ev;
      }
    }
  }
  return std::nullopt;
}

ChunkReport StackedNetwork::process_chunk(const DataChunk& chunk) {
  if (!chunk.labeled()) throw std::invalid_argument("process_chunk: unlabeled chunk");
  if (chunk.features() != inputs_ || chunk.classes() != outputs_) {
    throw std::invalid_argument("process_chunk: chunk shape does not match the stack");
  }
  ChunkReport rep;
  rep.stamp = chunk.stamp;
  const Eigen::MatrixXd& X = chunk.X;
  const Eigen::MatrixXd& Y = *chunk.Y;

  if (!tau_fixed_) {
    DriftConfig dc = detector_.config();
    dc.tau = cfg_.tau_chunks * static_cast<double>(chunk.size());
    detector_.set_config(dc);
    tau_fixed_ = true;
  }

  if (cfg_.feature_weighting) {
    weighter_.update(X);
    lambda_ = weighter_.weights();
  }

  if (links_.empty()) {
    add_layer(chunk.stamp);
    rep.layer_added = true;
    rep.training = links_[0].layer.train_chunk(input_for(0, X, {}), Y, chunk.stamp, rng_);
    rep.trained_layer = 1;
    std::tie(rep.verdict.alpha_drift, rep.verdict.alpha_warning) =
        significance_schedule(static_cast<double>(detector_.seen()), detector_.config());
    detector_.advance(chunk.size());
  } else {
    const ForwardResult fwd = forward(X);
    const std::vector<int> truth = class_indices(Y);
    std::vector<double> err(truth.size());
    for (std::size_t t = 0; t < truth.size(); ++t) err[t] = fwd.classes[t] == truth[t] ? 0.0 : 1.0;
    rep.verdict = detector_.observe(err);

    switch (rep.verdict.status) {
      case DriftStatus::Drift: {
        DataChunk train = chunk;
        std::vector<Eigen::MatrixXd> upstream = fwd.outputs;
        if (buffer_) {
          train = concat_chunks(*buffer_, chunk);
          upstream = forward(train.X).outputs;
          buffer_.reset();
        }
        add_layer(chunk.stamp);
        rep.layer_added = true;
        const std::size_t top = links_.size() - 1;
        rep.training = links_[top].layer.train_chunk(input_for(top, train.X, upstream), *train.Y, chunk.stamp, rng_);
        rep.trained_layer = top + 1;
        break;
      }
      case DriftStatus::Warning:
        buffer_ = buffer_ ? concat_chunks(*buffer_, chunk) : chunk;
        break;
      case DriftStatus::Stable: {
        buffer_.reset();
        const std::size_t top = links_.size() - 1;
        rep.training = links_[top].layer.train_chunk(input_for(top, X, fwd.outputs), Y, chunk.stamp, rng_);
        rep.trained_layer = top + 1;
        break;
      }
    }

    if (cfg_.layer_pruning) rep.merge = prune_layers(fwd.outputs, chunk.stamp);
  }

  rep.depth = links_.size();
  rep.nodes = total_nodes();
  for (const auto& l : links_) rep.layer_nodes.push_back(l.layer.size());
  rep.lambda = lambda_;
  return rep;
}

}  // namespace dsscn
