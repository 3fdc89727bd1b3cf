#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsd/io/binary.hpp"
#include "hsd/nn/networks.hpp"
#include "hsd/train/config.hpp"

namespace hsd::train {

struct Models {
  nn::DemosaicNet demosaic{nullptr};
  nn::RgbConverter rgb{nullptr};
  nn::SpectralRecoveryNet spectral{nullptr};
  nn::PatchDiscriminator discriminator{nullptr};
};

/// Fresh networks; parameter draws depend only on `cfg.seed`.
Models make_models(const TrainConfig& cfg);

struct NamedTensor {
  std::string name;
  torch::Tensor value;
};

enum class Phase : std::uint32_t { kInit = 0, kPretrained = 1, kJoint = 2 };

/// Serialized state of all four networks plus optimizer moments.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  Phase phase = Phase::kInit;
  std::string config_hash;
  std::string model_hash;
  std::int64_t step = 0;
  std::vector<NamedTensor> demosaic, rgb, spectral, discriminator;
  std::vector<NamedTensor> optimizer;  // empty unless phase == kJoint
};

/// Parameters and buffers in registration order.
std::vector<NamedTensor> capture_module(const torch::nn::Module& m);
void restore_module(torch::nn::Module& m, const std::vector<NamedTensor>& state, const std::string& label);

std::vector<NamedTensor> capture_adam(const torch::optim::Adam& opt, const std::string& prefix);
void restore_adam(torch::optim::Adam& opt, const std::vector<NamedTensor>& state, const std::string& prefix);

Checkpoint capture(const Models& m, const TrainConfig& cfg, Phase phase, std::int64_t step);
void restore(const Checkpoint& c, Models& m);

io::Bytes encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(const io::Bytes& data);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Raises ConfigError unless `c` was produced with compatible networks.
void require_compatible(const Checkpoint& c, const TrainConfig& cfg);

}  // namespace hsd::train
