#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/core/types.hpp"

namespace hsd::cli {

/// "row-major-<k>" -> MsfaPattern::row_major(k).
MsfaPattern parse_pattern_ref(const std::string& ref);

/// MOS1 carries its own pattern; PGM mosaics need `pattern`.
SnapshotMosaic load_mosaic_file(const std::filesystem::path& path, const std::optional<MsfaPattern>& pattern);

/// Dataset manifest (YAML):
///
///   notes: free text
///   files:
///     - {path: a/x.mos1, case: a, split: train}
///     - {path: b/y.pgm, case: b, split: test, pattern: row-major-4}
///
/// Paths are relative to the manifest's directory.
struct DatasetManifest {
  struct Entry {
    std::filesystem::path path;
    std::string case_id;
    std::string split;
    std::string pattern;
    std::string notes;
  };

  std::string notes;
  std::vector<Entry> entries;

  static DatasetManifest load(const std::filesystem::path& path);
  static DatasetManifest parse(const std::string& yaml_text, const std::filesystem::path& base);

  /// Split names are train / val / test; no file or case may appear in two
  /// splits. With `check_files`, every file must exist and parse.
  void validate(bool check_files) const;

  std::vector<Entry> split(const std::string& name) const;
};

/// Mosaics from a manifest split, a directory of .mos1 files (sorted by name)
/// or a single file.
std::vector<SnapshotMosaic> load_mosaics(const std::filesystem::path& source, const std::string& split,
                                         const std::optional<MsfaPattern>& pattern,
                                         std::vector<std::filesystem::path>* files = nullptr);

/// RGB images from a directory of .ppm files (sorted) or a single file.
std::vector<RgbImage> load_rgb_images(const std::filesystem::path& source,
                                      std::vector<std::filesystem::path>* files = nullptr);

}  // namespace hsd::cli
