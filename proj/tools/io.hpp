#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace phase_manifold::cli {

// Raised for bad arguments, unreadable configs and unwritable outputs (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits, '.' decimal point; parses back to the same double.
std::string format_double(double value);

// Header row plus one row per entry of `rows`, '\n' line ends.
std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

// Writes `text` to `path`, throwing UsageError when the file cannot be opened.
void write_file(const std::filesystem::path& path, const std::string& text);

// Fails early (UsageError) when the directory of `path` does not exist or is
// not writable.
void ensure_writable(const std::filesystem::path& path);

struct RunManifest {
  std::string tool_version;
  std::string command;
  nlohmann::json full_config;
  std::string timestamp;  // UTC, ISO 8601
  std::uint64_t master_seed = 0;

  nlohmann::json to_json() const;
};

RunManifest make_manifest(const std::string& command, nlohmann::json config,
                          std::uint64_t master_seed);

// Sidecar written next to a data file or prefix: `<base>.manifest.json`.
std::filesystem::path manifest_path(const std::filesystem::path& base);
void write_manifest(const std::filesystem::path& base, const RunManifest& manifest);

}  // namespace phase_manifold::cli
