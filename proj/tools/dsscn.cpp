// dsscn: generate streams, run experiments, inspect saved models, and
// compare the engine against the reference oracles.

#include "dsscn/config.hpp"
#include "dsscn/eval_harness.hpp"
#include "dsscn/snapshot.hpp"
#include "dsscn/stream_data.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using dsscn::RunConfig;

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct GenerateOptions {
  std::string kind;
  std::size_t samples = 100000;
  std::size_t drift_every = 25000;
  double minority = 0.0;
  std::size_t dim = 4;
  std::vector<double> w{1, 1, 1, 1};
  double w0 = 2.0;
  std::size_t drift_start = 48000;
  std::size_t drift_span = 36000;
  std::vector<double> w_after{1.8, 0.2, 1.5, 0.5};
  std::string out;
  std::uint64_t seed = 1;
};

int cmd_generate(const GenerateOptions& o) {
  dsscn::LabeledStream stream;
  if (o.kind == "sea") {
    std::optional<double> minority;
    if (o.minority > 0.0) minority = o.minority;
    stream = dsscn::generate_sea(o.samples, dsscn::sea_recurring_schedule(o.samples, o.drift_every), minority, o.seed);
  } else {
    dsscn::HyperplaneParams hp;
    hp.samples = o.samples;
    hp.dim = o.dim;
    hp.w = o.w;
    hp.w0 = o.w0;
    hp.drift_start = o.drift_start;
    hp.drift_span = o.drift_span;
    hp.w_after = o.w_after;
    stream = dsscn::generate_hyperplane(hp, o.seed);
  }
  dsscn::write_csv(stream, o.out);
  std::cout << stream.size() << " rows written to " << o.out << '\n';
  return 0;
}

struct RunOptions {
  std::string data;
  std::string dataset;
  std::string protocol;
  std::optional<std::size_t> chunk;
  std::optional<std::uint64_t> seed;
  std::optional<double> train_fraction;
  std::string config;
  std::vector<std::string> sets;
  std::string trace_out;
  std::string events_out;
  std::string summary_out;
  std::string summary_json;
  std::string model_out;
  std::size_t seeds = 1;
  std::size_t jobs = 1;
  bool no_timing = false;
};

// Protocol first (presets depend on it), then preset, config file, flags.
RunConfig resolve(const RunOptions& o) {
  RunConfig cfg;
  std::map<std::string, std::string> file;
  if (!o.config.empty()) file = dsscn::parse_settings_file(o.config);

  if (!o.protocol.empty()) {
    dsscn::apply_setting(cfg, "run.protocol", o.protocol);
  } else if (auto it = file.find("run.protocol"); it != file.end()) {
    dsscn::apply_setting(cfg, "run.protocol", it->second);
  }

  std::string preset = o.dataset;
  if (preset.empty()) {
    if (auto it = file.find("run.dataset"); it != file.end()) preset = it->second;
  }
  if (preset.empty()) preset = o.data.empty() ? "sea" : "";
  if (!preset.empty()) {
    try {
      dsscn::apply_preset(preset, cfg);
    } catch (const std::invalid_argument& e) {
      if (preset != "csv") throw dsscn::ConfigError(e.what());
      cfg.dataset = "csv";
    }
  } else {
    cfg.dataset = "csv";
  }

  for (const auto& [k, v] : file) {
    if (k != "run.dataset") dsscn::apply_setting(cfg, k, v);
  }
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw dsscn::ConfigError("--set expects key=value, got '" + s + "'");
    dsscn::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }

  if (!o.data.empty()) {
    if (cfg.dataset != "csv") throw dsscn::ConfigError("--data cannot be combined with the synthetic preset " + cfg.dataset);
    cfg.data_path = o.data;
  }
  if (o.chunk) cfg.chunk = *o.chunk;
  if (o.seed) cfg.seed = *o.seed;
  if (o.train_fraction) cfg.train_fraction = *o.train_fraction;
  if (o.no_timing) cfg.timing = false;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw dsscn::ConfigError(e.what());
  }
  return cfg;
}

std::string with_seed_suffix(const std::string& path, std::uint64_t seed) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const std::string tag = ".seed" + std::to_string(seed);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

nlohmann::json stat_json(const dsscn::Stat& s) { return {{"mean", s.mean}, {"std", s.std}}; }

nlohmann::json summary_json(const dsscn::Summary& s) {
  return {{"chunks", s.chunks},
          {"tested_chunks", s.tested},
          {"accuracy", stat_json(s.accuracy)},
          {"nodes", stat_json(s.nodes)},
          {"depth", stat_json(s.depth)},
          {"runtime", stat_json(s.runtime)},
          {"final_depth", s.final_depth},
          {"final_nodes", s.final_nodes},
          {"drift_stamps", s.drift_stamps},
          {"warning_stamps", s.warning_stamps},
          {"scope_events", s.scope_events}};
}

int cmd_run(const RunOptions& o) {
  const RunConfig cfg = resolve(o);
  const auto config = dsscn::describe(cfg);

  std::cout << "# resolved configuration\n";
  for (const auto& [k, v] : config) std::cout << k << " = " << v << '\n';
  std::cout.flush();

  std::vector<dsscn::RunReport> reports;
  if (o.seeds <= 1) {
    reports.push_back(dsscn::run_experiment(cfg));
  } else {
    reports = dsscn::run_seeds(cfg, o.seeds, std::max<std::size_t>(o.jobs, 1));
  }

  std::vector<double> accuracies;
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const std::uint64_t seed = cfg.seed + i;
    if (!o.trace_out.empty()) {
      dsscn::write_trace(reports.size() == 1 ? o.trace_out : with_seed_suffix(o.trace_out, seed), r.rows);
    }
    if (!o.events_out.empty()) {
      dsscn::write_events(reports.size() == 1 ? o.events_out : with_seed_suffix(o.events_out, seed), r.events);
    }
    accuracies.push_back(r.summary.accuracy.mean);
    runs.push_back({{"seed", seed}, {"summary", summary_json(r.summary)}});
    std::cout << "# seed " << seed << '\n';
    dsscn::write_summary(std::cout, r.summary, {});
  }

  if (reports.size() > 1) {
    const auto across = dsscn::mean_std(accuracies);
    std::cout << "# across seeds\n"
              << "seeds = " << reports.size() << '\n'
              << "accuracy_mean = " << dsscn::format_double(across.mean) << '\n'
              << "accuracy_std = " << dsscn::format_double(across.std) << '\n';
  }

  if (!o.summary_out.empty()) {
    std::ofstream out(o.summary_out);
    if (!out) throw std::runtime_error("cannot write " + o.summary_out);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i == 0) {
        dsscn::write_summary(out, reports[i].summary, config);
      } else {
        out << "# seed " << cfg.seed + i << '\n';
        dsscn::write_summary(out, reports[i].summary, {});
      }
    }
    if (reports.size() > 1) {
      const auto across = dsscn::mean_std(accuracies);
      out << "# across seeds\nseeds = " << reports.size() << "\naccuracy_mean = "
          << dsscn::format_double(across.mean) << "\naccuracy_std = " << dsscn::format_double(across.std) << '\n';
    }
  }
  if (!o.summary_json.empty()) {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::object();
    for (const auto& [k, v] : config) doc["config"][k] = v;
    doc["runs"] = runs;
    const auto across = dsscn::mean_std(accuracies);
    doc["accuracy"] = {{"mean", across.mean}, {"std", across.std}};
    std::ofstream out(o.summary_json);
    if (!out) throw std::runtime_error("cannot write " + o.summary_json);
    out << doc.dump(2) << '\n';
  }
  if (!o.model_out.empty()) dsscn::save_stack(*reports.front().model, o.model_out);
  return 0;
}

int cmd_inspect(const std::string& path) {
  const auto net = dsscn::load_stack(path);
  const auto& cfg = net.config();
  std::cout << "inputs = " << net.inputs() << '\n'
            << "outputs = " << net.outputs() << '\n'
            << "depth = " << net.depth() << '\n'
            << "total_nodes = " << net.total_nodes() << '\n'
            << "alpha = " << dsscn::format_double(cfg.alpha) << '\n'
            << "delta_merge = " << dsscn::format_double(cfg.delta_merge) << '\n'
            << "samples_seen = " << net.detector().seen() << '\n';
  std::cout << "lambda =";
  for (double v : net.lambda()) std::cout << ' ' << dsscn::format_double(v);
  std::cout << '\n';
  for (std::size_t i = 0; i < net.depth(); ++i) {
    const auto& link = net.links()[i];
    std::cout << "layer " << i + 1 << ": nodes = " << link.layer.size() << ", born = " << link.birth_stamp << '\n';
  }
  return 0;
}

struct OracleOptions {
  std::string check;
  std::size_t n = 1000;
  std::size_t length = 200;
  std::size_t samples = 10000;
  std::size_t dim = 3;
  std::uint64_t seed = 1;
};

int cmd_oracle(const OracleOptions& o) {
  oracle::CheckResult r;
  if (o.check == "mici") {
    r = oracle::check_mici(o.n, o.length, o.seed);
  } else if (o.check == "density") {
    r = oracle::check_density(o.samples, o.dim, o.seed);
  } else if (o.check == "fwgrls") {
    r = oracle::check_fwgrls(o.samples == 10000 ? 50 : o.samples, o.dim, o.seed);
  } else if (o.check == "hoeffding") {
    r = oracle::check_hoeffding();
  } else if (o.check == "chebyshev") {
    r = oracle::check_chebyshev(o.samples, o.dim, o.seed);
  } else {
    std::cerr << "unknown check '" << o.check << "' (mici, density, fwgrls, hoeffding, chebyshev)\n";
    return kUsageError;
  }
  std::printf("%s: max deviation %.3e (tolerance %.0e) %s; %s\n", r.name.c_str(), r.max_dev, r.tolerance,
              r.pass ? "PASS" : "FAIL", r.detail.c_str());
  return r.pass ? 0 : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep stacked stochastic configuration network for data streams"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic labeled stream as CSV");
  generate->add_option("kind", gen.kind, "sea or hyperplane")->required()->check(CLI::IsMember({"sea", "hyperplane"}));
  generate->add_option("--samples", gen.samples, "Number of rows");
  generate->add_option("--drift-every", gen.drift_every, "SEA: samples between threshold switches");
  generate->add_option("--minority", gen.minority, "SEA: class-1 fraction, 0 keeps the natural balance");
  generate->add_option("--dim", gen.dim, "Hyperplane: input dimension");
  generate->add_option("--w", gen.w, "Hyperplane: initial weights")->delimiter(',');
  generate->add_option("--w0", gen.w0, "Hyperplane: offset");
  generate->add_option("--drift-start", gen.drift_start, "Hyperplane: first sample of the transition");
  generate->add_option("--drift-span", gen.drift_span, "Hyperplane: transition length in samples");
  generate->add_option("--w-after", gen.w_after, "Hyperplane: final weights")->delimiter(',');
  generate->add_option("--out", gen.out, "Output CSV path")->required();
  generate->add_option("--seed", gen.seed, "Random seed");

  RunOptions run;
  auto* runc = app.add_subcommand("run", "Run an experiment and write its trace and summary");
  runc->add_option("--data", run.data, "CSV stream (label in the last column by default)");
  runc->add_option("--dataset", run.dataset, "Preset: sea, hyperplane, weather, electricity, susy, rfid")
      ->check(CLI::IsMember(dsscn::preset_names()));
  runc->add_option("--protocol", run.protocol, "holdout or prequential")
      ->check(CLI::IsMember({"holdout", "prequential"}));
  runc->add_option("--chunk", run.chunk, "Samples per time stamp");
  runc->add_option("--seed", run.seed, "Random seed");
  runc->add_option("--train-fraction", run.train_fraction, "Holdout: leading fraction of each chunk used to train");
  runc->add_option("--config", run.config, "key = value settings file")->check(CLI::ExistingFile);
  runc->add_option("--set", run.sets, "Extra key=value setting, repeatable");
  runc->add_option("--trace-out", run.trace_out, "Per-stamp trace CSV");
  runc->add_option("--events-out", run.events_out, "Node configuration log CSV");
  runc->add_option("--summary-out", run.summary_out, "key = value summary");
  runc->add_option("--summary-json", run.summary_json, "JSON summary");
  runc->add_option("--model-out", run.model_out, "Snapshot of the final model");
  runc->add_option("--seeds", run.seeds, "Independent runs with seeds seed, seed+1, ...")->check(CLI::PositiveNumber);
  runc->add_option("--jobs", run.jobs, "Parallel runs for --seeds")->check(CLI::PositiveNumber);
  runc->add_flag("--no-timing", run.no_timing, "Write zero runtimes so traces are byte-reproducible");

  std::string model_path;
  auto* inspect = app.add_subcommand("inspect", "Describe a saved model");
  inspect->add_option("--model", model_path, "Snapshot path")->required()->check(CLI::ExistingFile);

  OracleOptions orc;
  auto* oraclec = app.add_subcommand("oracle", "Compare the engine with an independent reference computation");
  oraclec->add_option("check", orc.check, "mici, density, fwgrls, hoeffding or chebyshev")->required();
  oraclec->add_option("--n", orc.n, "mici: number of random pairs");
  oraclec->add_option("--length", orc.length, "mici: series length");
  oraclec->add_option("--samples", orc.samples, "density and chebyshev: sample count; fwgrls: sample count (50)");
  oraclec->add_option("--dim", orc.dim, "Input dimension");
  oraclec->add_option("--seed", orc.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*runc) return cmd_run(run);
    if (*inspect) return cmd_inspect(model_path);
    if (*oraclec) return cmd_oracle(orc);
  } catch (const dsscn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return 0;
}
