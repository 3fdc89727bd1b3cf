#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace hsd::cli {

/// Flat dotted-key configuration, e.g. {"lr.generator": "1e-05"}.
using KeyValues = std::map<std::string, std::string>;

/// Reads a YAML mapping and flattens nested maps to dotted keys. Sequences
/// are not allowed; scalars keep their source spelling.
KeyValues load_config_file(const std::filesystem::path& path);
KeyValues parse_config_text(const std::string& text);

/// "key=value" -> (key, value); UsageError when there is no '='.
std::pair<std::string, std::string> split_assignment(const std::string& s);

/// SHA-256 hex of the sorted "key=value\n" listing.
std::string hash_key_values(const KeyValues& kv);

/// Environment variable naming the default data root.
inline constexpr const char* kDataRootEnv = "HSD_DATA_ROOT";

/// Relative input paths resolve against $HSD_DATA_ROOT when it is set.
std::filesystem::path resolve_input(const std::string& path);

}  // namespace hsd::cli
