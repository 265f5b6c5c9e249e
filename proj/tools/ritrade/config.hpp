#pragma once

#include "ritrade/engine.hpp"
#include "ritrade/stream_io.hpp"
#include "ritrade/tuner.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace ritrade::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

/// Every recognized key with its default.
[[nodiscard]] const KeyValues& default_config();

/// Flat `key = value` lines; '#' starts a comment. Unknown keys are an error.
[[nodiscard]] KeyValues load_config_file(const std::filesystem::path& path);

/// "key=value" override; throws ConfigError for unknown keys or missing '='.
void apply_override(KeyValues& kv, const std::string& assignment);

struct Settings {
  KeyValues resolved;  // defaults merged with file and overrides
  BacktestConfig backtest;
  TuneConfig tune;
  ParseMode parse_mode = ParseMode::Strict;
  std::string solver = "dp";
  double oracle_budget = 1e8;
};

/// Validates and converts; throws ConfigError naming the offending key.
[[nodiscard]] Settings resolve(const KeyValues& overrides);

/// "updates" or "interval:<minutes>".
[[nodiscard]] SolveTrigger parse_solve_mode(const std::string& text);

}  // namespace ritrade::cli
