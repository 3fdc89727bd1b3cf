#include "hsd/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>

#include "hsd/errors.hpp"
#include "hsd/io/binary.hpp"
#include "hsd/train/config.hpp"

namespace hsd::cli {
namespace {

void flatten(const YAML::Node& node, const std::string& prefix, KeyValues& out) {
  switch (node.Type()) {
    case YAML::NodeType::Map:
      for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
      }
      break;
    case YAML::NodeType::Scalar:
      if (prefix.empty()) throw ConfigError("configuration must be a mapping");
      out[prefix] = node.Scalar();
      break;
    case YAML::NodeType::Null:
      if (!prefix.empty()) out[prefix] = "";
      break;
    default:
      throw ConfigError("configuration key '" + prefix + "' holds a sequence; only scalars are allowed");
  }
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  try {
    KeyValues out;
    flatten(YAML::Load(text), "", out);
    return out;
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("configuration parse error: ") + e.what());
  }
}

KeyValues load_config_file(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_config_text(std::string(bytes.begin(), bytes.end()));
}

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::string hash_key_values(const KeyValues& kv) {
  std::string text;
  for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
  return train::sha256_hex(text.data(), text.size());
}

std::filesystem::path resolve_input(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kDataRootEnv); root && *root) return std::filesystem::path(root) / p;
  return p;
}

}  // namespace hsd::cli
