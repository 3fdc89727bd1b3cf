#include "hsd/train/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "hsd/errors.hpp"

namespace hsd::train {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T>
T parse_int(const std::string& key, const std::string& s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad integer for " + key + ": '" + s + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + s + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + s + "'");
}

struct Field {
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
  bool shapes_model = false;
};

template <class T>
Field int_field(T TrainConfig::*member, bool shapes = false) {
  return {[member](const TrainConfig& c) { return std::to_string(c.*member); },
          [member](TrainConfig& c, const std::string& k, const std::string& v) { c.*member = parse_int<T>(k, v); },
          shapes};
}

template <class Sub, class T>
Field nested_int(Sub TrainConfig::*outer, T Sub::*inner, bool shapes = true) {
  return {[=](const TrainConfig& c) { return std::to_string(c.*outer.*inner); },
          [=](TrainConfig& c, const std::string& k, const std::string& v) { c.*outer.*inner = parse_int<T>(k, v); },
          shapes};
}

Field real_field(double TrainConfig::*member) {
  return {[member](const TrainConfig& c) { return fmt(c.*member); },
          [member](TrainConfig& c, const std::string& k, const std::string& v) { c.*member = parse_real(k, v); }};
}

template <class Sub>
Field nested_real(Sub TrainConfig::*outer, double Sub::*inner) {
  return {[=](const TrainConfig& c) { return fmt(c.*outer.*inner); },
          [=](TrainConfig& c, const std::string& k, const std::string& v) { c.*outer.*inner = parse_real(k, v); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    using C = TrainConfig;
    std::map<std::string, Field> f;
    f["generator.bands"] = nested_int(&C::generator, &nn::GeneratorConfig::bands);
    f["generator.base_channels"] = nested_int(&C::generator, &nn::GeneratorConfig::base_channels);
    f["generator.depth"] = nested_int(&C::generator, &nn::GeneratorConfig::depth);
    f["generator.blocks_per_level"] = nested_int(&C::generator, &nn::GeneratorConfig::blocks_per_level);
    f["generator.scales"] = nested_int(&C::generator, &nn::GeneratorConfig::scales);
    f["rgb.hidden_width"] = nested_int(&C::rgb, &nn::RgbConverterConfig::hidden_width);
    f["spectral.channels"] = nested_int(&C::spectral, &nn::SpectralRecoveryConfig::channels);
    f["spectral.blocks"] = nested_int(&C::spectral, &nn::SpectralRecoveryConfig::blocks);
    f["spectral.reduction"] = nested_int(&C::spectral, &nn::SpectralRecoveryConfig::reduction);
    f["discriminator.base_channels"] = nested_int(&C::discriminator, &nn::DiscriminatorConfig::base_channels);
    f["discriminator.norm"] = {
        [](const C& c) { return std::string(c.discriminator.norm == nn::PatchNorm::kNone ? "none" : "instance"); },
        [](C& c, const std::string& k, const std::string& v) {
          if (v == "none") c.discriminator.norm = nn::PatchNorm::kNone;
          else if (v == "instance") c.discriminator.norm = nn::PatchNorm::kInstance;
          else throw ConfigError("bad value for " + k + ": '" + v + "' (none | instance)");
        },
        true};
    f["period"] = int_field(&C::period, true);
    f["lr.generator"] = real_field(&C::lr_generator);
    f["lr.rgb"] = real_field(&C::lr_rgb);
    f["lr.spectral"] = real_field(&C::lr_spectral);
    f["lr.discriminator"] = real_field(&C::lr_discriminator);
    f["lr.pretrain_rgb"] = real_field(&C::lr_pretrain_rgb);
    f["lr.pretrain_spectral"] = real_field(&C::lr_pretrain_spectral);
    f["lr.pretrain_demosaic"] = real_field(&C::lr_pretrain_demosaic);
    f["adam.beta1"] = nested_real(&C::adam, &AdamSettings::beta1);
    f["adam.beta2"] = nested_real(&C::adam, &AdamSettings::beta2);
    f["adam.eps"] = nested_real(&C::adam, &AdamSettings::eps);
    f["batch_size"] = int_field(&C::batch_size);
    f["crop"] = int_field(&C::crop);
    f["steps.pretrain_rgb"] = int_field(&C::pretrain_rgb_steps);
    f["steps.pretrain_spectral"] = int_field(&C::pretrain_spectral_steps);
    f["steps.pretrain_demosaic"] = int_field(&C::pretrain_demosaic_steps);
    f["steps.joint"] = int_field(&C::joint_steps);
    f["checkpoint.every"] = int_field(&C::checkpoint_every);
    f["checkpoint.dir"] = {[](const C& c) { return c.checkpoint_dir; },
                           [](C& c, const std::string&, const std::string& v) { c.checkpoint_dir = v; }};
    f["seed"] = int_field(&C::seed);
    f["deterministic"] = {[](const C& c) { return std::string(c.deterministic ? "true" : "false"); },
                          [](C& c, const std::string& k, const std::string& v) { c.deterministic = parse_bool(k, v); }};
    f["prefetch"] = {[](const C& c) { return std::string(c.prefetch ? "true" : "false"); },
                     [](C& c, const std::string& k, const std::string& v) { c.prefetch = parse_bool(k, v); }};
    f["loss.lambda_sgc"] = nested_real(&C::weights, &nn::LossWeights::lambda_sgc);
    f["loss.lambda_tv"] = nested_real(&C::weights, &nn::LossWeights::lambda_tv);
    f["loss.lambda_ips"] = nested_real(&C::weights, &nn::LossWeights::lambda_ips);
    f["loss.lambda_gan"] = nested_real(&C::weights, &nn::LossWeights::lambda_gan);
    f["loss.lambda_cyc"] = nested_real(&C::weights, &nn::LossWeights::lambda_cyc);
    f["loss.sgc"] = {[](const C& c) { return c.sgc; },
                     [](C& c, const std::string&, const std::string& v) { c.sgc = v; }};
    return f;
  }();
  return table;
}

std::string hash_fields(const TrainConfig& cfg, bool model_only) {
  std::string text;
  for (const auto& [key, field] : fields()) {
    if (model_only && !field.shapes_model) continue;
    if (key == "checkpoint.dir") continue;  // output location only
    text += key + "=" + field.get(cfg) + "\n";
  }
  return sha256_hex(text.data(), text.size());
}

}  // namespace

void TrainConfig::validate() const {
  generator.validate();
  rgb.validate();
  spectral.validate();
  discriminator.validate();
  if (rgb.input_bands != generator.bands || spectral.bands != generator.bands) {
    throw ConfigError("generator, rgb converter and spectral recovery band counts differ");
  }
  if (period < 1) throw ConfigError("period must be positive");
  for (double lr : {lr_generator, lr_rgb, lr_spectral, lr_discriminator, lr_pretrain_rgb, lr_pretrain_spectral,
                    lr_pretrain_demosaic}) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rates must be positive");
  }
  if (!(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1 && adam.eps > 0)) {
    throw ConfigError("invalid adam settings");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (crop < 0 || crop % period != 0) throw ConfigError("crop must be a non-negative multiple of the period");
  for (auto s : {pretrain_rgb_steps, pretrain_spectral_steps, pretrain_demosaic_steps, joint_steps, checkpoint_every}) {
    if (s < 0) throw ConfigError("step counts must be non-negative");
  }
  weights.validate();
  nn::sgc_by_name(sgc);
}

std::map<std::string, std::string> to_key_values(const TrainConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(cfg);
  return out;
}

void set_key(TrainConfig& cfg, const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
  // Band count is shared by the three spectral networks.
  cfg.rgb.input_bands = cfg.generator.bands;
  cfg.spectral.bands = cfg.generator.bands;
}

std::string config_hash(const TrainConfig& cfg) { return hash_fields(cfg, false); }

std::string model_hash(const TrainConfig& cfg) { return hash_fields(cfg, true); }

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr) != 1) throw IoError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace hsd::train
