#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <string>
#include <vector>

namespace hsd::nn {

// ---------------------------------------------------------------------------
// Configurations
// ---------------------------------------------------------------------------

/// U-shaped demosaicking backbone with multi-scale residual blocks.
struct GeneratorConfig {
  std::int64_t bands = 16;
  std::int64_t base_channels = 32;
  std::int64_t depth = 3;             // number of down/up levels, >= 1
  std::int64_t blocks_per_level = 1;  // multi-scale residual blocks per level
  std::int64_t scales = 4;            // channel groups inside a block

  void validate() const;
};

/// Per-pixel spectral -> RGB map: B -> hidden -> 3, 1x1 convolutions.
struct RgbConverterConfig {
  std::int64_t input_bands = 16;
  std::int64_t hidden_width = 64;

  void validate() const;
};

/// RGB -> spectrum reference network with channel attention.
struct SpectralRecoveryConfig {
  std::int64_t bands = 16;
  std::int64_t channels = 32;
  std::int64_t blocks = 2;
  std::int64_t reduction = 4;  // channel-attention squeeze ratio

  void validate() const;
};

enum class PatchNorm { kNone, kInstance };

/// 70 x 70 patch discriminator: four 4x4 convolutions (strides 2, 2, 2, 1)
/// and a 4x4 stride-1 score layer.
struct DiscriminatorConfig {
  std::int64_t input_channels = 3;
  std::int64_t base_channels = 64;
  PatchNorm norm = PatchNorm::kNone;

  void validate() const;
  static constexpr std::int64_t kReceptiveField = 70;
  static constexpr std::int64_t kTotalStride = 8;
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// Res2Net-style block: 1x1 in, `scales` hierarchical 3x3 branches where each
/// branch also sees the previous branch's output, 1x1 fuse, identity skip.
class Res2BlockImpl : public torch::nn::Module {
 public:
  Res2BlockImpl(std::int64_t channels, std::int64_t scales);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  std::int64_t scales_;
  torch::nn::Conv2d in_{nullptr};
  torch::nn::ModuleList branches_;
  torch::nn::Conv2d fuse_{nullptr};
};
TORCH_MODULE(Res2Block);

// ---------------------------------------------------------------------------
// Demosaicking generator
// ---------------------------------------------------------------------------

/// Refines the bilinear cube and re-imposes the raw samples:
///
///   out = override(clamp(lin + backbone(lin), 0, 1), mosaic)
///
/// The override is structural, so sampled pixels equal the mosaic exactly for
/// any parameters.
class DemosaicNetImpl : public torch::nn::Module {
 public:
  explicit DemosaicNetImpl(GeneratorConfig cfg);

  /// lin: [N, B, H, W]; mosaic: [N, 1, H, W]; mask: [1 or N, B, H, W] bool.
  torch::Tensor forward(const torch::Tensor& lin, const torch::Tensor& mosaic,
                        const torch::Tensor& mask);

  /// Backbone correction before clamping and override.
  torch::Tensor residual(const torch::Tensor& lin);

  /// Zeroes the output projection so the network reproduces its input.
  void zero_residual_head();

  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  torch::nn::Conv2d stem_{nullptr};
  torch::nn::ModuleList encoders_, downs_, ups_, reducers_, decoders_;
  torch::nn::Sequential bottleneck_{nullptr};
  torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(DemosaicNet);

/// Exact override on tensors: mosaic values wherever `mask` is set.
torch::Tensor override_samples(const torch::Tensor& cube, const torch::Tensor& mosaic,
                               const torch::Tensor& mask);

// ---------------------------------------------------------------------------
// Colour models
// ---------------------------------------------------------------------------

class RgbConverterImpl : public torch::nn::Module {
 public:
  explicit RgbConverterImpl(RgbConverterConfig cfg);
  torch::Tensor forward(const torch::Tensor& cube);
  const RgbConverterConfig& config() const { return cfg_; }

 private:
  RgbConverterConfig cfg_;
  torch::nn::Conv2d expand_{nullptr};
  torch::nn::Conv2d reduce_{nullptr};
};
TORCH_MODULE(RgbConverter);

/// Squeeze-and-excitation channel attention.
class ChannelAttentionImpl : public torch::nn::Module {
 public:
  ChannelAttentionImpl(std::int64_t channels, std::int64_t reduction);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d squeeze_{nullptr};
  torch::nn::Conv2d excite_{nullptr};
};
TORCH_MODULE(ChannelAttention);

/// Stand-in for the attention-based spectral recovery network: same contract
/// (3 -> B channels, size preserving, differentiable). Swap the body for a
/// faithful reimplementation without touching callers.
class SpectralRecoveryNetImpl : public torch::nn::Module {
 public:
  explicit SpectralRecoveryNetImpl(SpectralRecoveryConfig cfg);
  torch::Tensor forward(const torch::Tensor& rgb);
  const SpectralRecoveryConfig& config() const { return cfg_; }

 private:
  SpectralRecoveryConfig cfg_;
  torch::nn::Conv2d stem_{nullptr};
  torch::nn::ModuleList convs_a_, convs_b_, attention_;
  torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(SpectralRecoveryNet);

// ---------------------------------------------------------------------------
// Discriminator
// ---------------------------------------------------------------------------

class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit PatchDiscriminatorImpl(DiscriminatorConfig cfg);

  /// [N, 3, H, W] with H, W >= 70 -> [N, 1, H', W'] patch scores.
  torch::Tensor forward(const torch::Tensor& rgb);

  /// Xavier-normal weights, zero biases.
  void xavier_init();

  /// Output size along one axis for an input of `in` pixels.
  static std::int64_t output_size(std::int64_t in);

  const DiscriminatorConfig& config() const { return cfg_; }

 private:
  DiscriminatorConfig cfg_;
  torch::nn::ModuleList convs_;
  torch::nn::ModuleList norms_;
};
TORCH_MODULE(PatchDiscriminator);

}  // namespace hsd::nn
