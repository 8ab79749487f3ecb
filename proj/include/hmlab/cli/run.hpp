#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmlab/cli/config.hpp"

namespace hmlab::cli {

inline constexpr const char* kVersion = "hmlab 0.1.0";

struct CheckInfo {
  std::string name;
  Mode mode;  // analyze also runs the simulate checks
  std::string description;
};
const std::vector<CheckInfo>& check_registry();
// Names of the checks a mode enables, in registry order.
std::vector<std::string> enabled_checks(Mode m);

enum class Status { pass, fail, skipped };
std::string to_string(Status s);

struct CheckResult {
  std::string name;
  Status status = Status::skipped;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct FileEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string mode;
  std::string config_hash;
  std::string version = kVersion;
  std::string started, finished;  // UTC, ISO 8601
  std::vector<CheckResult> checks;
  std::vector<FileEntry> files;   // every artifact except manifest.json itself
  nlohmann::json outcome = nlohmann::json::object();

  bool all_pass() const;  // no check failed (skipped checks do not count)
  nlohmann::json to_json() const;
};

// Runs the configured pipeline, writes every artifact under cfg.output_dir and then
// manifest.json. Scientific failures are recorded in the manifest; I/O failures throw.
RunManifest execute(const RunConfig& cfg);

}  // namespace hmlab::cli
