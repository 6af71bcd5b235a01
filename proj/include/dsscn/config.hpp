#pragma once

#include "dsscn/eval_harness.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dsscn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text. '#' starts a comment; blank lines are skipped.
/// Later duplicates win. Throws ConfigError naming the line on bad syntax.
std::map<std::string, std::string> parse_settings(std::istream& in, const std::string& origin);
std::map<std::string, std::string> parse_settings_file(const std::string& path);

/// Sets one dotted key (e.g. "stack.alpha"). Throws ConfigError on an
/// unknown key or an unparsable value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& settings);

/// Every key with its current value, in a stable order. Feeding the result
/// back through apply_setting reproduces the configuration.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace dsscn
