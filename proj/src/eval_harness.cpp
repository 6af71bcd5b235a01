#include "dsscn/eval_harness.hpp"

#include "dsscn/config.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dsscn {

std::string to_string(Protocol p) { return p == Protocol::Holdout ? "holdout" : "prequential"; }

void RunConfig::validate() const {
  if (chunk < 2) throw std::invalid_argument("run.chunk must be >= 2");
  if (protocol == Protocol::Holdout && !(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("run.train_fraction must lie in (0, 1)");
  }
  if (dataset == "csv" && data_path.empty()) throw std::invalid_argument("csv source needs a data path");
  if (dataset != "sea" && dataset != "hyperplane" && dataset != "csv") {
    throw std::invalid_argument("unknown source '" + dataset + "'");
  }
  if (!(sea_minority >= 0.0 && sea_minority < 1.0)) throw std::invalid_argument("source.sea_minority must lie in [0, 1)");
  stack.validate();
}

namespace {

struct Preset {
  std::string name;
  std::string source;
  std::size_t chunk;
  double train_fraction;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"sea", "sea", 500, 0.8},
      {"hyperplane", "hyperplane", 1200, 1000.0 / 1200.0},
      {"weather", "csv", 6000, 0.8},
      {"electricity", "csv", 500, 0.8},
      {"susy", "csv", 500, 0.8},
      {"rfid", "csv", 2813, 2000.0 / 2813.0},
  };
  return table;
}

constexpr std::size_t kPrequentialChunk = 500;

}  // namespace

void apply_preset(const std::string& name, RunConfig& cfg) {
  for (const auto& p : presets()) {
    if (p.name != name) continue;
    cfg.dataset = p.source;
    cfg.chunk = cfg.protocol == Protocol::Prequential ? kPrequentialChunk : p.chunk;
    cfg.train_fraction = p.train_fraction;
    if (p.source == "sea") {
      cfg.samples = 100000;
      cfg.sea_drift_every = 25000;
    } else if (p.source == "hyperplane") {
      cfg.samples = 120000;
      cfg.hp_dim = 4;
      cfg.hp_drift_start = 48000;
      cfg.hp_drift_span = 36000;
    }
    return;
  }
  throw std::invalid_argument("unknown dataset preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.push_back(p.name);
  return out;
}

std::unique_ptr<ChunkSource> make_source(const RunConfig& cfg) {
  if (cfg.dataset == "sea") {
    std::optional<double> minority;
    if (cfg.sea_minority > 0.0) minority = cfg.sea_minority;
    auto stream = generate_sea(cfg.samples, sea_recurring_schedule(cfg.samples, cfg.sea_drift_every), minority, cfg.seed);
    return std::make_unique<StreamChunker>(std::move(stream), cfg.chunk);
  }
  if (cfg.dataset == "hyperplane") {
    HyperplaneParams hp;
    hp.samples = cfg.samples;
    hp.dim = cfg.hp_dim;
    hp.w = cfg.hp_w;
    hp.w0 = cfg.hp_w0;
    hp.drift_start = cfg.hp_drift_start;
    hp.drift_span = cfg.hp_drift_span;
    hp.w_after = cfg.hp_w_after;
    return std::make_unique<StreamChunker>(generate_hyperplane(hp, cfg.seed), cfg.chunk);
  }
  if (cfg.dataset == "csv") return std::make_unique<CsvStream>(cfg.data_path, cfg.chunk, cfg.label_column);
  throw std::invalid_argument("unknown source '" + cfg.dataset + "'");
}

Stat mean_std(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

Summary summarize(const std::vector<TraceRow>& rows) {
  Summary s;
  s.chunks = rows.size();
  std::vector<double> acc, nodes, depth, runtime;
  for (const auto& r : rows) {
    if (r.n_test > 0) acc.push_back(r.accuracy);
    nodes.push_back(static_cast<double>(r.nodes));
    depth.push_back(static_cast<double>(r.depth));
    runtime.push_back(r.runtime);
    if (r.status == DriftStatus::Drift) s.drift_stamps.push_back(r.stamp);
    if (r.status == DriftStatus::Warning) s.warning_stamps.push_back(r.stamp);
    s.scope_events += r.scopes.size();
  }
  s.tested = acc.size();
  s.accuracy = mean_std(acc);
  s.nodes = mean_std(nodes);
  s.depth = mean_std(depth);
  s.runtime = mean_std(runtime);
  if (!rows.empty()) {
    s.final_depth = rows.back().depth;
    s.final_nodes = rows.back().nodes;
  }
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t stack_seed(std::uint64_t seed) { return seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL; }

double score(const StackedNetwork& net, const DataChunk& chunk) {
  const ForwardResult f = net.forward(chunk.X);
  const std::vector<int> truth = class_indices(*chunk.Y);
  std::size_t ok = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) ok += f.classes[t] == truth[t] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

void fill_row(TraceRow& row, const ChunkReport& rep, std::vector<ConfigEvent>& events) {
  row.stamp = rep.stamp;
  row.nodes = rep.nodes;
  row.depth = rep.depth;
  row.status = rep.verdict.status;
  row.cut = rep.verdict.cut;
  row.dist = rep.verdict.dist;
  row.eps_drift = rep.verdict.eps_drift;
  row.eps_warning = rep.verdict.eps_warning;
  row.alpha_drift = rep.verdict.alpha_drift;
  row.alpha_warning = rep.verdict.alpha_warning;
  row.lambda.assign(rep.lambda.data(), rep.lambda.data() + rep.lambda.size());
  for (const auto& e : rep.training.events) {
    row.scopes.push_back(e.scope);
    events.push_back({rep.trained_layer, e});
  }
}

RunReport finish(const RunConfig& cfg, std::vector<TraceRow> rows, std::vector<ConfigEvent> events,
                 std::shared_ptr<StackedNetwork> net) {
  RunReport out;
  out.rows = std::move(rows);
  out.events = std::move(events);
  out.summary = summarize(out.rows);
  out.config = describe(cfg);
  out.model = std::move(net);
  return out;
}

}  // namespace

RunReport run_holdout(const RunConfig& cfg, ChunkSource& source) {
  cfg.validate();
  auto net = std::make_shared<StackedNetwork>(source.features(), static_cast<std::size_t>(source.classes()),
                                              cfg.stack, stack_seed(cfg.seed));
  std::vector<TraceRow> rows;
  std::vector<ConfigEvent> events;
  while (auto chunk = source.next()) {
    const std::size_t N = chunk->size();
    if (N < 2) throw std::invalid_argument("hold-out chunk " + std::to_string(chunk->stamp) + " is too small to split");
    const auto want = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(N)));
    const std::size_t n_train = std::clamp<std::size_t>(want, 1, N - 1);
    const DataChunk train = chunk->slice(0, n_train);
    const DataChunk test = chunk->slice(n_train, N);

    const auto t0 = Clock::now();
    const ChunkReport rep = net->process_chunk(train);
    TraceRow row;
    row.accuracy = score(*net, test);
    row.runtime = cfg.timing ? std::chrono::duration<double>(Clock::now() - t0).count() : 0.0;
    fill_row(row, rep, events);
    row.n_train = n_train;
    row.n_test = N - n_train;
    rows.push_back(std::move(row));
  }
  return finish(cfg, std::move(rows), std::move(events), std::move(net));
}

RunReport run_prequential(const RunConfig& cfg, ChunkSource& source) {
  cfg.validate();
  auto net = std::make_shared<StackedNetwork>(source.features(), static_cast<std::size_t>(source.classes()),
                                              cfg.stack, stack_seed(cfg.seed));
  std::vector<TraceRow> rows;
  std::vector<ConfigEvent> events;
  while (auto chunk = source.next()) {
    const auto t0 = Clock::now();
    TraceRow row;
    if (net->depth() > 0) {
      row.accuracy = score(*net, *chunk);
      row.n_test = chunk->size();
    }
    const ChunkReport rep = net->process_chunk(*chunk);
    row.runtime = cfg.timing ? std::chrono::duration<double>(Clock::now() - t0).count() : 0.0;
    fill_row(row, rep, events);
    row.n_train = chunk->size();
    rows.push_back(std::move(row));
  }
  return finish(cfg, std::move(rows), std::move(events), std::move(net));
}

RunReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  auto source = make_source(cfg);
  return cfg.protocol == Protocol::Holdout ? run_holdout(cfg, *source) : run_prequential(cfg, *source);
}

std::vector<RunReport> run_seeds(const RunConfig& cfg, std::size_t seeds, std::size_t jobs) {
  if (seeds == 0) throw std::invalid_argument("run_seeds: no seeds");
  std::vector<RunReport> out(seeds);
  std::vector<std::exception_ptr> errors(seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds; i = next++) {
      try {
        RunConfig c = cfg;
        c.seed = cfg.seed + i;
        out[i] = run_experiment(c);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, seeds);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t to_size(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trace line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

DriftStatus to_status(const std::string& s, std::size_t line) {
  if (s == "STABLE") return DriftStatus::Stable;
  if (s == "WARNING") return DriftStatus::Warning;
  if (s == "DRIFT") return DriftStatus::Drift;
  throw std::runtime_error("trace line " + std::to_string(line) + ": bad status '" + s + "'");
}

constexpr std::size_t kFixedColumns = 14;

}  // namespace

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().lambda.size();
  out << "stamp,n_train,n_test,accuracy,nodes,depth,runtime,status,cut,dist,eps_drift,eps_warning,alpha_D,alpha_W";
  for (std::size_t j = 1; j <= n; ++j) out << ",lambda_" << j;
  out << ",scopes\n";
  for (const auto& r : rows) {
    out << r.stamp << ',' << r.n_train << ',' << r.n_test << ',' << (r.n_test > 0 ? fmt(r.accuracy) : "") << ','
        << r.nodes << ',' << r.depth << ',' << fmt(r.runtime) << ',' << to_string(r.status) << ','
        << (r.cut ? std::to_string(*r.cut) : "") << ',' << fmt(r.dist) << ',' << fmt(r.eps_drift) << ','
        << fmt(r.eps_warning) << ',' << fmt(r.alpha_drift) << ',' << fmt(r.alpha_warning);
    for (double l : r.lambda) out << ',' << fmt(l);
    out << ',';
    for (std::size_t k = 0; k < r.scopes.size(); ++k) out << (k ? ";" : "") << fmt(r.scopes[k]);
    out << '\n';
  }
}

void write_trace(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace(out, rows);
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace");
  const auto header = split(line, ',');
  if (header.size() < kFixedColumns + 1 || header.front() != "stamp" || header.back() != "scopes") {
    throw std::runtime_error("trace header not recognized");
  }
  const std::size_t n = header.size() - kFixedColumns - 1;
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != header.size()) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
    }
    TraceRow r;
    r.stamp = to_size(c[0], line_no);
    r.n_train = to_size(c[1], line_no);
    r.n_test = to_size(c[2], line_no);
    if (!c[3].empty()) r.accuracy = to_double(c[3], line_no);
    r.nodes = to_size(c[4], line_no);
    r.depth = to_size(c[5], line_no);
    r.runtime = to_double(c[6], line_no);
    r.status = to_status(c[7], line_no);
    if (!c[8].empty()) r.cut = to_size(c[8], line_no);
    r.dist = to_double(c[9], line_no);
    r.eps_drift = to_double(c[10], line_no);
    r.eps_warning = to_double(c[11], line_no);
    r.alpha_drift = to_double(c[12], line_no);
    r.alpha_warning = to_double(c[13], line_no);
    for (std::size_t j = 0; j < n; ++j) r.lambda.push_back(to_double(c[kFixedColumns + j], line_no));
    if (!c.back().empty()) {
      for (const auto& s : split(c.back(), ';')) r.scopes.push_back(to_double(s, line_no));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TraceRow> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace(in);
}

void write_events(std::ostream& out, const std::vector<ConfigEvent>& events) {
  out << "stamp,layer,nodes_before,scope,zeta_total,satisfied\n";
  for (const auto& e : events) {
    out << e.scn.stamp << ',' << e.layer << ',' << e.scn.nodes_before << ',' << fmt(e.scn.scope) << ','
        << fmt(e.scn.zeta_total) << ',' << (e.scn.satisfied ? 1 : 0) << '\n';
  }
}

void write_events(const std::string& path, const std::vector<ConfigEvent>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_events(out, events);
}

void write_summary(std::ostream& out, const Summary& s,
                   const std::vector<std::pair<std::string, std::string>>& config) {
  auto join = [](const std::vector<std::size_t>& v) {
    std::string r;
    for (std::size_t i = 0; i < v.size(); ++i) r += (i ? "," : "") + std::to_string(v[i]);
    return r;
  };
  if (!config.empty()) {
    out << "# configuration\n";
    for (const auto& [k, v] : config) out << k << " = " << v << '\n';
  }
  out << "# summary\n";
  out << "chunks = " << s.chunks << '\n';
  out << "tested_chunks = " << s.tested << '\n';
  out << "accuracy_mean = " << fmt(s.accuracy.mean) << '\n';
  out << "accuracy_std = " << fmt(s.accuracy.std) << '\n';
  out << "nodes_mean = " << fmt(s.nodes.mean) << '\n';
  out << "nodes_std = " << fmt(s.nodes.std) << '\n';
  out << "depth_mean = " << fmt(s.depth.mean) << '\n';
  out << "depth_std = " << fmt(s.depth.std) << '\n';
  out << "runtime_mean = " << fmt(s.runtime.mean) << '\n';
  out << "runtime_std = " << fmt(s.runtime.std) << '\n';
  out << "final_depth = " << s.final_depth << '\n';
  out << "final_nodes = " << s.final_nodes << '\n';
  out << "drift_stamps = " << join(s.drift_stamps) << '\n';
  out << "warning_stamps = " << join(s.warning_stamps) << '\n';
  out << "scope_events = " << s.scope_events << '\n';
}

}  // namespace dsscn
