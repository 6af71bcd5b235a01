#pragma once

#include "dsscn/stacked_network.hpp"
#include "dsscn/stream_data.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dsscn {

enum class Protocol { Holdout, Prequential };

std::string to_string(Protocol p);

struct RunConfig {
  // source
  std::string dataset = "sea";  // sea | hyperplane | csv
  std::string data_path;
  int label_column = -1;
  std::size_t samples = 100000;
  std::size_t sea_drift_every = 25000;
  double sea_minority = 0.0;  // 0 keeps the natural class balance
  std::size_t hp_dim = 4;
  std::vector<double> hp_w{1, 1, 1, 1};
  double hp_w0 = 2.0;
  std::size_t hp_drift_start = 48000;
  std::size_t hp_drift_span = 36000;
  std::vector<double> hp_w_after{1.8, 0.2, 1.5, 0.5};

  // protocol
  Protocol protocol = Protocol::Prequential;
  std::size_t chunk = 500;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  bool timing = true;  // false writes 0 runtimes, making traces byte-reproducible

  StackConfig stack;

  void validate() const;
};

/// Per-dataset defaults. Synthetic names select their generator; the real
/// dataset names select csv ingestion with the published chunk sizes and
/// still need a data path. Throws std::invalid_argument on an unknown name.
void apply_preset(const std::string& name, RunConfig& cfg);
std::vector<std::string> preset_names();

std::unique_ptr<ChunkSource> make_source(const RunConfig& cfg);

struct TraceRow {
  std::size_t stamp = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double accuracy = 0.0;  // meaningless when n_test == 0
  std::size_t nodes = 0;
  std::size_t depth = 0;
  double runtime = 0.0;
  DriftStatus status = DriftStatus::Stable;
  std::optional<std::size_t> cut;
  double dist = 0.0;
  double eps_drift = 0.0;
  double eps_warning = 0.0;
  double alpha_drift = 0.0;
  double alpha_warning = 0.0;
  std::vector<double> lambda;
  std::vector<double> scopes;  // scope of every node configured in this chunk
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // population
};

/// Mean and population standard deviation. Zeros for an empty input.
Stat mean_std(const std::vector<double>& values);

struct Summary {
  std::size_t chunks = 0;
  std::size_t tested = 0;
  Stat accuracy;  // over tested chunks
  Stat nodes;
  Stat depth;
  Stat runtime;
  std::size_t final_depth = 0;
  std::size_t final_nodes = 0;
  std::vector<std::size_t> drift_stamps;
  std::vector<std::size_t> warning_stamps;
  std::size_t scope_events = 0;
};

Summary summarize(const std::vector<TraceRow>& rows);

/// One node configuration, tagged with the 1-based layer it was added to.
struct ConfigEvent {
  std::size_t layer = 0;
  ScnEvent scn;
};

struct RunReport {
  std::vector<TraceRow> rows;
  std::vector<ConfigEvent> events;
  Summary summary;
  std::vector<std::pair<std::string, std::string>> config;
  std::shared_ptr<StackedNetwork> model;
};

/// Each chunk: the leading train_fraction goes to process_chunk, the rest is
/// scored by the updated model. Throws std::invalid_argument for a chunk of
/// fewer than two rows.
RunReport run_holdout(const RunConfig& cfg, ChunkSource& source);
/// Each chunk after the first is scored by the current model, then trained on.
RunReport run_prequential(const RunConfig& cfg, ChunkSource& source);
/// Builds the configured source and runs the configured protocol.
RunReport run_experiment(const RunConfig& cfg);

/// Independent runs for seeds seed, seed+1, ... on up to `jobs` threads.
/// Reports come back in seed order.
std::vector<RunReport> run_seeds(const RunConfig& cfg, std::size_t seeds, std::size_t jobs);

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace(const std::string& path, const std::vector<TraceRow>& rows);
/// Throws std::runtime_error on malformed input.
std::vector<TraceRow> read_trace(std::istream& in);
std::vector<TraceRow> read_trace(const std::string& path);

/// CSV with header stamp,layer,nodes_before,scope,zeta_total,satisfied.
void write_events(std::ostream& out, const std::vector<ConfigEvent>& events);
void write_events(const std::string& path, const std::vector<ConfigEvent>& events);

/// key = value report: resolved configuration, then the summary block.
void write_summary(std::ostream& out, const Summary& s,
                   const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace dsscn
