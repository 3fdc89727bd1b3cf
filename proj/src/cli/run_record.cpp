#include "hsd/cli/run_record.hpp"

#include <torch/version.h>

#include "hsd/io/binary.hpp"
#include "hsd/train/config.hpp"

#ifndef HSD_VERSION
#define HSD_VERSION "0.0.0"
#endif

namespace hsd::cli {

nlohmann::json version_info() {
  return {{"hsd", HSD_VERSION},
          {"torch", TORCH_VERSION},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)}};
}

nlohmann::json RunRecord::to_json() const {
  auto files = [](const std::vector<FileDigest>& fs) {
    auto a = nlohmann::json::array();
    for (const auto& f : fs) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  nlohmann::json j;
  j["command"] = command;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["config"] = config;
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  j["versions"] = version_info();
  j["metadata"] = metadata;
  return j;
}

FileDigest digest_file(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return {path.string(), train::sha256_hex(bytes.data(), bytes.size())};
}

void write_run_record(const std::filesystem::path& dir, const RunRecord& rec) {
  io::write_file_atomic(dir / "run.json", rec.to_json().dump(2) + "\n");
}

}  // namespace hsd::cli
