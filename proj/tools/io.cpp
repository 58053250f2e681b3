#include "io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <unistd.h>

#ifndef PHASE_MANIFOLD_VERSION
#define PHASE_MANIFOLD_VERSION "0.0.0"
#endif

namespace phase_manifold::cli {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k > 0) out += ',';
    out += header[k];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0) out += ',';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

void ensure_writable(const fs::path& path) {
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw UsageError("output directory does not exist: " + dir.string());
  }
  if (::access(dir.c_str(), W_OK) != 0) {
    throw UsageError("output directory is not writable: " + dir.string());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open output file: " + path.string());
  out << text;
  out.close();
  if (!out) throw UsageError("failed writing output file: " + path.string());
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool_version", tool_version},
          {"command", command},
          {"full_config", full_config},
          {"timestamp", timestamp},
          {"master_seed", master_seed}};
}

RunManifest make_manifest(const std::string& command, nlohmann::json config,
                          std::uint64_t master_seed) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return {PHASE_MANIFOLD_VERSION, command, std::move(config), stamp, master_seed};
}

fs::path manifest_path(const fs::path& base) {
  return fs::path(base.string() + ".manifest.json");
}

void write_manifest(const fs::path& base, const RunManifest& manifest) {
  write_file(manifest_path(base), manifest.to_json().dump(2) + "\n");
}

}  // namespace phase_manifold::cli
