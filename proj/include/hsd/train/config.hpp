#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hsd/nn/losses.hpp"
#include "hsd/nn/networks.hpp"

namespace hsd::train {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  nn::GeneratorConfig generator;
  nn::RgbConverterConfig rgb;
  nn::SpectralRecoveryConfig spectral;
  nn::DiscriminatorConfig discriminator;
  std::int64_t period = 4;

  // Joint fine-tuning rates.
  double lr_generator = 1e-5;
  double lr_rgb = 1e-3;
  double lr_spectral = 1e-6;
  double lr_discriminator = 2e-4;
  // Pre-training rates.
  double lr_pretrain_rgb = 1e-2;
  double lr_pretrain_spectral = 1e-4;
  double lr_pretrain_demosaic = 3e-4;
  AdamSettings adam;

  std::int64_t batch_size = 4;
  std::int64_t crop = 72;  // square crop side, a multiple of `period`; 0 = whole image
  std::int64_t pretrain_rgb_steps = 500;
  std::int64_t pretrain_spectral_steps = 500;
  std::int64_t pretrain_demosaic_steps = 500;
  std::int64_t joint_steps = 2000;
  std::int64_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::string checkpoint_dir;

  std::uint64_t seed = 0;
  bool deterministic = true;
  bool prefetch = true;

  nn::LossWeights weights;
  std::string sgc = "pan-l1";

  void validate() const;
};

/// Flat dotted-key view, e.g. "generator.base_channels" -> "32".
std::map<std::string, std::string> to_key_values(const TrainConfig& cfg);

/// Sets one dotted key. Unknown keys and unparsable values raise ConfigError.
void set_key(TrainConfig& cfg, const std::string& key, const std::string& value);

/// SHA-256 hex of the canonical key/value listing.
std::string config_hash(const TrainConfig& cfg);

/// SHA-256 hex over the network-shaping keys only; checkpoints are compatible
/// with any config sharing this hash.
std::string model_hash(const TrainConfig& cfg);

std::string sha256_hex(const void* data, std::size_t size);

}  // namespace hsd::train
