#include "dsscn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace dsscn {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto t = trim(v);
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto t = trim(v);
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto t = trim(v);
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "true" || t == "1" || t == "on") return true;
  if (t == "false" || t == "0" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

Protocol parse_protocol(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "holdout") return Protocol::Holdout;
  if (t == "prequential") return Protocol::Prequential;
  throw ConfigError(key + ": expected holdout or prequential, got '" + v + "'");
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DSSCN_DOUBLE(member) \
  Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); }, \
          [](const RunConfig& c) { return format_double(c.member); } }
#define DSSCN_UINT(member) \
  Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_uint(k, v); }, \
          [](const RunConfig& c) { return std::to_string(c.member); } }
#define DSSCN_BOOL(member) \
  Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_bool(k, v); }, \
          [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); } }
#define DSSCN_LIST(member) \
  Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_list(k, v); }, \
          [](const RunConfig& c) { return join(c.member); } }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"run.dataset", Field{[](RunConfig& c, const std::string&, const std::string& v) { c.dataset = trim(v); },
                            [](const RunConfig& c) { return c.dataset; }}},
      {"run.data", Field{[](RunConfig& c, const std::string&, const std::string& v) { c.data_path = trim(v); },
                         [](const RunConfig& c) { return c.data_path; }}},
      {"run.label_column",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) { c.label_column = parse_int(k, v); },
             [](const RunConfig& c) { return std::to_string(c.label_column); }}},
      {"run.protocol",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) { c.protocol = parse_protocol(k, v); },
             [](const RunConfig& c) { return to_string(c.protocol); }}},
      {"run.chunk", DSSCN_UINT(chunk)},
      {"run.train_fraction", DSSCN_DOUBLE(train_fraction)},
      {"run.seed", DSSCN_UINT(seed)},
      {"run.timing", DSSCN_BOOL(timing)},
      {"source.samples", DSSCN_UINT(samples)},
      {"source.sea_drift_every", DSSCN_UINT(sea_drift_every)},
      {"source.sea_minority", DSSCN_DOUBLE(sea_minority)},
      {"source.hp_dim", DSSCN_UINT(hp_dim)},
      {"source.hp_w", DSSCN_LIST(hp_w)},
      {"source.hp_w0", DSSCN_DOUBLE(hp_w0)},
      {"source.hp_drift_start", DSSCN_UINT(hp_drift_start)},
      {"source.hp_drift_span", DSSCN_UINT(hp_drift_span)},
      {"source.hp_w_after", DSSCN_LIST(hp_w_after)},
      {"stack.alpha", DSSCN_DOUBLE(stack.alpha)},
      {"stack.delta_merge", DSSCN_DOUBLE(stack.delta_merge)},
      {"stack.feature_weighting", DSSCN_BOOL(stack.feature_weighting)},
      {"stack.layer_pruning", DSSCN_BOOL(stack.layer_pruning)},
      {"drift.tau_chunks", DSSCN_DOUBLE(stack.tau_chunks)},
      {"drift.history_chunks", DSSCN_UINT(stack.history_chunks)},
      {"drift.alpha_min_drift", DSSCN_DOUBLE(stack.alpha_min_drift)},
      {"drift.alpha_min_warning", DSSCN_DOUBLE(stack.alpha_min_warning)},
      {"escn.q", DSSCN_DOUBLE(stack.escn.q)},
      {"escn.omega", DSSCN_DOUBLE(stack.escn.omega)},
      {"escn.rho_decay", DSSCN_DOUBLE(stack.escn.rho_decay)},
      {"escn.delta_c", DSSCN_DOUBLE(stack.escn.delta_c)},
      {"escn.p_b", DSSCN_DOUBLE(stack.escn.p_b)},
      {"escn.theta_prune", DSSCN_DOUBLE(stack.escn.theta_prune)},
      {"scn.t_max",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) { c.stack.escn.scn.t_max = parse_int(k, v); },
             [](const RunConfig& c) { return std::to_string(c.stack.escn.scn.t_max); }}},
      {"scn.scopes", DSSCN_LIST(stack.escn.scn.scopes)},
      {"scn.r", DSSCN_DOUBLE(stack.escn.scn.r)},
  };
  return table;
}

#undef DSSCN_DOUBLE
#undef DSSCN_UINT
#undef DSSCN_BOOL
#undef DSSCN_LIST

}  // namespace

std::map<std::string, std::string> parse_settings(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(n) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(n) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> parse_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_settings(in, path);
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& settings) {
  for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, field] : fields()) out.emplace_back(key, field.get(cfg));
  return out;
}

}  // namespace dsscn
