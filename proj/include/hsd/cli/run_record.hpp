#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsd/cli/config.hpp"

namespace hsd::cli {

struct FileDigest {
  std::string path;
  std::string sha256;
};

/// Everything needed to repeat a run: resolved configuration, its hash, the
/// seed and digests of every input and output file.
struct RunRecord {
  std::string command;
  KeyValues config;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  nlohmann::json metadata = nlohmann::json::object();
  std::string status = "ok";
  std::string error;

  nlohmann::json to_json() const;
};

FileDigest digest_file(const std::filesystem::path& path);

/// Writes `run.json` into `dir` atomically.
void write_run_record(const std::filesystem::path& dir, const RunRecord& rec);

/// Tool and library version strings.
nlohmann::json version_info();

}  // namespace hsd::cli
