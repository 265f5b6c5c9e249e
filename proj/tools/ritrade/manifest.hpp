#pragma once

#include "ritrade/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ritrade::cli {

/// Hex SHA-256 of a file's bytes. Throws DataError when unreadable.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  KeyValues config;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  unsigned workers = 1;
  double wall_s = 0.0;
};

/// Writes manifest.json into `dir` with the resolved config, input and output hashes, the
/// tool version and timing.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace ritrade::cli
