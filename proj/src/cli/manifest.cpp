#include "hsd/cli/manifest.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <map>
#include <set>

#include "hsd/errors.hpp"
#include "hsd/io/binary.hpp"
#include "hsd/io/containers.hpp"
#include "hsd/io/netpbm.hpp"

namespace hsd::cli {
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> files_with(const fs::path& dir, const std::vector<std::string>& exts) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (std::find(exts.begin(), exts.end(), e.path().extension().string()) != exts.end()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string scalar(const YAML::Node& n, const char* key, bool required, std::size_t index) {
  if (!n[key]) {
    if (required) throw ConfigError("manifest entry " + std::to_string(index) + " lacks '" + key + "'");
    return {};
  }
  return n[key].as<std::string>();
}

}  // namespace

MsfaPattern parse_pattern_ref(const std::string& ref) {
  const std::string prefix = "row-major-";
  if (ref.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const auto k = std::stoul(ref.substr(prefix.size()), &used);
      if (used == ref.size() - prefix.size()) return MsfaPattern::row_major(k);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown pattern reference '" + ref + "' (expected row-major-<k>)");
}

SnapshotMosaic load_mosaic_file(const fs::path& path, const std::optional<MsfaPattern>& pattern) {
  const auto ext = path.extension().string();
  if (ext == ".mos1") return io::load_mos1(path);
  if (ext == ".pgm") {
    if (!pattern) throw ConfigError(path.string() + ": PGM mosaics need a pattern reference");
    return io::mosaic_from_netpbm(io::load_netpbm(path), *pattern);
  }
  throw ConfigError(path.string() + ": unsupported mosaic file type (use .mos1 or .pgm)");
}

DatasetManifest DatasetManifest::parse(const std::string& yaml_text, const fs::path& base) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("manifest parse error: ") + e.what());
  }
  if (!root.IsMap() || !root["files"] || !root["files"].IsSequence()) {
    throw ConfigError("manifest needs a 'files' sequence");
  }
  DatasetManifest m;
  if (root["notes"]) m.notes = root["notes"].as<std::string>();
  std::size_t i = 0;
  for (const auto& n : root["files"]) {
    if (!n.IsMap()) throw ConfigError("manifest entry " + std::to_string(i) + " is not a mapping");
    Entry e;
    e.path = base / scalar(n, "path", true, i);
    e.case_id = scalar(n, "case", true, i);
    e.split = scalar(n, "split", true, i);
    e.pattern = scalar(n, "pattern", false, i);
    e.notes = scalar(n, "notes", false, i);
    m.entries.push_back(std::move(e));
    ++i;
  }
  return m;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return parse(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

void DatasetManifest::validate(bool check_files) const {
  static const std::set<std::string> kSplits = {"train", "val", "test"};
  std::map<std::string, std::string> file_split, case_split;
  for (const auto& e : entries) {
    if (!kSplits.count(e.split)) throw ConfigError("unknown split '" + e.split + "' for " + e.path.string());
    const auto key = e.path.lexically_normal().string();
    if (!file_split.emplace(key, e.split).second) {
      throw ConfigError("file " + key + " is listed more than once");
    }
    auto [it, inserted] = case_split.emplace(e.case_id, e.split);
    if (!inserted && it->second != e.split) {
      throw ConfigError("case '" + e.case_id + "' appears in both '" + it->second + "' and '" + e.split + "'");
    }
    if (check_files) {
      std::optional<MsfaPattern> p;
      if (!e.pattern.empty()) p = parse_pattern_ref(e.pattern);
      load_mosaic_file(e.path, p);
    }
  }
}

std::vector<DatasetManifest::Entry> DatasetManifest::split(const std::string& name) const {
  std::vector<Entry> out;
  for (const auto& e : entries)
    if (e.split == name) out.push_back(e);
  return out;
}

std::vector<SnapshotMosaic> load_mosaics(const fs::path& source, const std::string& split,
                                         const std::optional<MsfaPattern>& pattern, std::vector<fs::path>* files) {
  std::vector<SnapshotMosaic> out;
  auto add = [&](const fs::path& p, const std::optional<MsfaPattern>& pat) {
    out.push_back(load_mosaic_file(p, pat));
    if (files) files->push_back(p);
  };
  if (fs::is_directory(source)) {
    for (const auto& p : files_with(source, {".mos1", ".pgm"})) add(p, pattern);
  } else if (source.extension() == ".yaml" || source.extension() == ".yml") {
    auto m = DatasetManifest::load(source);
    m.validate(false);
    for (const auto& e : m.split(split)) {
      add(e.path, e.pattern.empty() ? pattern : std::optional<MsfaPattern>(parse_pattern_ref(e.pattern)));
    }
  } else {
    add(source, pattern);
  }
  if (out.empty()) throw ConfigError("no mosaics found in " + source.string());
  return out;
}

std::vector<RgbImage> load_rgb_images(const fs::path& source, std::vector<fs::path>* files) {
  std::vector<fs::path> paths = fs::is_directory(source) ? files_with(source, {".ppm"}) : std::vector{source};
  std::vector<RgbImage> out;
  for (const auto& p : paths) {
    out.push_back(io::rgb_from_netpbm(io::load_netpbm(p)));
    if (files) files->push_back(p);
  }
  if (out.empty()) throw ConfigError("no RGB images found in " + source.string());
  return out;
}

}  // namespace hsd::cli
