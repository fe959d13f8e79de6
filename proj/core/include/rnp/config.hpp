#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rnp/cho.hpp"
#include "rnp/stepper.hpp"

namespace rnp {

/// Parse or constraint failure; `line` is 1-based, 0 for semantic errors that
/// are not tied to a single line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line(line) {}
  int line;
};

/// Key/value echo of a run: the fully resolved configuration (defaults
/// expanded) plus bookkeeping entries. to_string() emits re-parseable
/// `key = value` lines, section header first.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
  void add(const std::string& key, const char* value) { entries.emplace_back(key, value); }
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, bool value) { entries.emplace_back(key, value ? "true" : "false"); }
  std::string to_string() const;
};

struct ParsedConfig {
  enum class Model { rnp, cho } model = Model::rnp;
  SolverConfig solver;  // valid when model == rnp (tau resolved)
  ChoConfig cho;        // valid when model == cho
  RunManifest manifest; // config echo, defaults expanded
};

/// Strict line-oriented `key = value` parser. The first significant line must
/// be `[rnp]` or `[cho]`; `#` starts a comment; unknown and duplicate keys
/// are rejected with line numbers; constraint violations surface the
/// validation message. Throws ConfigError.
ParsedConfig parse_config(const std::string& text);

/// Convenience: reads the file and parses it.
ParsedConfig parse_config_file(const std::string& path);

extern const char* const kVersionString;

}  // namespace rnp
