#include "hsd/nn/networks.hpp"

#include "hsd/errors.hpp"

namespace hsd::nn {
namespace F = torch::nn::functional;

namespace {

constexpr double kSlope = 0.2;

torch::Tensor lrelu(const torch::Tensor& x) {
  return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(kSlope));
}

torch::nn::Conv2d conv(std::int64_t in, std::int64_t out, std::int64_t k, std::int64_t stride = 1,
                       std::int64_t pad = -1) {
  if (pad < 0) pad = k / 2;
  return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, k).stride(stride).padding(pad));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void GeneratorConfig::validate() const {
  require(bands >= 1, "generator needs at least one band");
  require(depth >= 1, "generator depth must be >= 1");
  require(blocks_per_level >= 0, "generator block count must be >= 0");
  require(scales >= 1, "generator scales must be >= 1");
  require(base_channels >= scales && base_channels % scales == 0,
          "generator base_channels must be a positive multiple of scales");
}

void RgbConverterConfig::validate() const {
  require(input_bands >= 1, "rgb converter needs at least one input band");
  require(hidden_width >= input_bands, "rgb converter hidden_width must be >= input_bands");
}

void SpectralRecoveryConfig::validate() const {
  require(bands >= 1 && channels >= 1 && blocks >= 0, "invalid spectral recovery configuration");
  require(reduction >= 1 && channels / reduction >= 1, "channel attention reduction too large");
}

void DiscriminatorConfig::validate() const {
  require(input_channels == 3, "the discriminator scores RGB images");
  require(base_channels >= 1, "discriminator base_channels must be positive");
}

// --- Res2Block --------------------------------------------------------------

Res2BlockImpl::Res2BlockImpl(std::int64_t channels, std::int64_t scales) : scales_(scales) {
  const auto width = channels / scales;
  in_ = register_module("in", conv(channels, channels, 1));
  branches_ = register_module("branches", torch::nn::ModuleList());
  for (std::int64_t i = 1; i < scales; ++i) branches_->push_back(conv(width, width, 3));
  fuse_ = register_module("fuse", conv(channels, channels, 1));
}

torch::Tensor Res2BlockImpl::forward(const torch::Tensor& x) {
  auto parts = lrelu(in_->forward(x)).chunk(scales_, 1);
  std::vector<torch::Tensor> outs{parts[0]};
  torch::Tensor prev;
  for (std::int64_t i = 1; i < scales_; ++i) {
    auto input = i == 1 ? parts[i] : parts[i] + prev;
    prev = lrelu(branches_[i - 1]->as<torch::nn::Conv2dImpl>()->forward(input));
    outs.push_back(prev);
  }
  return x + fuse_->forward(torch::cat(outs, 1));
}

// --- DemosaicNet --------------------------------------------------------------

DemosaicNetImpl::DemosaicNetImpl(GeneratorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto c0 = cfg_.base_channels;
  stem_ = register_module("stem", conv(cfg_.bands, c0, 3));
  encoders_ = register_module("encoders", torch::nn::ModuleList());
  downs_ = register_module("downs", torch::nn::ModuleList());
  ups_ = register_module("ups", torch::nn::ModuleList());
  reducers_ = register_module("reducers", torch::nn::ModuleList());
  decoders_ = register_module("decoders", torch::nn::ModuleList());

  auto blocks = [&](std::int64_t ch) {
    torch::nn::Sequential seq;
    for (std::int64_t i = 0; i < cfg_.blocks_per_level; ++i) seq->push_back(Res2Block(ch, cfg_.scales));
    return seq;
  };

  std::int64_t ch = c0;
  for (std::int64_t d = 0; d < cfg_.depth; ++d) {
    encoders_->push_back(blocks(ch));
    downs_->push_back(conv(ch, ch * 2, 3, 2, 1));
    ch *= 2;
  }
  bottleneck_ = register_module("bottleneck", blocks(ch));
  for (std::int64_t d = 0; d < cfg_.depth; ++d) {
    ups_->push_back(torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(ch, ch / 2, 2).stride(2)));
    ch /= 2;
    reducers_->push_back(conv(ch * 2, ch, 1));
    decoders_->push_back(blocks(ch));
  }
  head_ = register_module("head", conv(c0, cfg_.bands, 3));
  zero_residual_head();
}

void DemosaicNetImpl::zero_residual_head() {
  torch::NoGradGuard guard;
  head_->weight.zero_();
  head_->bias.zero_();
}

torch::Tensor DemosaicNetImpl::residual(const torch::Tensor& lin) {
  if (lin.dim() != 4 || lin.size(1) != cfg_.bands) {
    throw ShapeError("generator expects [N, " + std::to_string(cfg_.bands) + ", H, W] input");
  }
  const std::int64_t unit = std::int64_t{1} << cfg_.depth;
  const auto h = lin.size(2), w = lin.size(3);
  const auto ph = (unit - h % unit) % unit, pw = (unit - w % unit) % unit;
  auto x = lin;
  if (ph || pw) x = F::pad(lin, F::PadFuncOptions({0, pw, 0, ph}).mode(torch::kReplicate));

  x = lrelu(stem_->forward(x));
  std::vector<torch::Tensor> skips;
  for (std::int64_t d = 0; d < cfg_.depth; ++d) {
    x = encoders_[d]->as<torch::nn::SequentialImpl>()->forward(x);
    skips.push_back(x);
    x = lrelu(downs_[d]->as<torch::nn::Conv2dImpl>()->forward(x));
  }
  x = bottleneck_->forward(x);
  for (std::int64_t d = 0; d < cfg_.depth; ++d) {
    x = ups_[d]->as<torch::nn::ConvTranspose2dImpl>()->forward(x);
    x = torch::cat({x, skips.back()}, 1);
    skips.pop_back();
    x = lrelu(reducers_[d]->as<torch::nn::Conv2dImpl>()->forward(x));
    x = decoders_[d]->as<torch::nn::SequentialImpl>()->forward(x);
  }
  x = head_->forward(x);
  if (ph || pw) x = x.narrow(2, 0, h).narrow(3, 0, w);
  return x;
}

torch::Tensor override_samples(const torch::Tensor& cube, const torch::Tensor& mosaic,
                               const torch::Tensor& mask) {
  if (cube.dim() != 4 || mosaic.dim() != 4 || mosaic.size(1) != 1 || mask.dim() != 4 ||
      cube.size(1) != mask.size(1) || cube.size(2) != mosaic.size(2) ||
      cube.size(3) != mosaic.size(3) || cube.size(2) != mask.size(2) || cube.size(3) != mask.size(3)) {
    throw ShapeError("override needs matching [N, B, H, W] cube, [N, 1, H, W] mosaic and [*, B, H, W] mask");
  }
  return torch::where(mask, mosaic.expand_as(cube), cube);
}

torch::Tensor DemosaicNetImpl::forward(const torch::Tensor& lin, const torch::Tensor& mosaic,
                                       const torch::Tensor& mask) {
  if (mosaic.dim() != 4 || lin.dim() != 4 || mosaic.size(0) != lin.size(0) ||
      mosaic.size(2) != lin.size(2) || mosaic.size(3) != lin.size(3)) {
    throw ShapeError("generator cube and mosaic shapes disagree");
  }
  auto refined = torch::clamp(lin + residual(lin), 0.0, 1.0);
  return override_samples(refined, mosaic, mask);
}

// --- RgbConverter ---------------------------------------------------------------

RgbConverterImpl::RgbConverterImpl(RgbConverterConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  expand_ = register_module("expand", conv(cfg_.input_bands, cfg_.hidden_width, 1));
  reduce_ = register_module("reduce", conv(cfg_.hidden_width, 3, 1));
  torch::NoGradGuard guard;
  reduce_->bias.fill_(0.5);
}

torch::Tensor RgbConverterImpl::forward(const torch::Tensor& cube) {
  if (cube.dim() != 4 || cube.size(1) != cfg_.input_bands) {
    throw ShapeError("rgb converter expects " + std::to_string(cfg_.input_bands) + " bands, got " +
                     (cube.dim() == 4 ? std::to_string(cube.size(1)) : std::string("a non-4D tensor")));
  }
  return torch::clamp(reduce_->forward(torch::relu(expand_->forward(cube))), 0.0, 1.0);
}

// --- SpectralRecoveryNet -------------------------------------------------------------

ChannelAttentionImpl::ChannelAttentionImpl(std::int64_t channels, std::int64_t reduction) {
  squeeze_ = register_module("squeeze", conv(channels, channels / reduction, 1));
  excite_ = register_module("excite", conv(channels / reduction, channels, 1));
}

torch::Tensor ChannelAttentionImpl::forward(const torch::Tensor& x) {
  auto s = x.mean({2, 3}, /*keepdim=*/true);
  return x * torch::sigmoid(excite_->forward(torch::relu(squeeze_->forward(s))));
}

SpectralRecoveryNetImpl::SpectralRecoveryNetImpl(SpectralRecoveryConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  stem_ = register_module("stem", conv(3, cfg_.channels, 3));
  convs_a_ = register_module("convs_a", torch::nn::ModuleList());
  convs_b_ = register_module("convs_b", torch::nn::ModuleList());
  attention_ = register_module("attention", torch::nn::ModuleList());
  for (std::int64_t i = 0; i < cfg_.blocks; ++i) {
    convs_a_->push_back(conv(cfg_.channels, cfg_.channels, 3));
    convs_b_->push_back(conv(cfg_.channels, cfg_.channels, 3));
    attention_->push_back(ChannelAttention(cfg_.channels, cfg_.reduction));
  }
  head_ = register_module("head", conv(cfg_.channels, cfg_.bands, 3));
}

torch::Tensor SpectralRecoveryNetImpl::forward(const torch::Tensor& rgb) {
  if (rgb.dim() != 4 || rgb.size(1) != 3) throw ShapeError("spectral recovery expects [N, 3, H, W] input");
  auto x = lrelu(stem_->forward(rgb));
  for (std::int64_t i = 0; i < cfg_.blocks; ++i) {
    auto y = lrelu(convs_a_[i]->as<torch::nn::Conv2dImpl>()->forward(x));
    y = convs_b_[i]->as<torch::nn::Conv2dImpl>()->forward(y);
    x = x + attention_[i]->as<ChannelAttentionImpl>()->forward(y);
  }
  return head_->forward(x);
}

// --- PatchDiscriminator ----------------------------------------------------------

PatchDiscriminatorImpl::PatchDiscriminatorImpl(DiscriminatorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  convs_ = register_module("convs", torch::nn::ModuleList());
  norms_ = register_module("norms", torch::nn::ModuleList());
  const auto c = cfg_.base_channels;
  const std::int64_t widths[] = {c, c * 2, c * 4, c * 8};
  const std::int64_t strides[] = {2, 2, 2, 1};
  std::int64_t in = cfg_.input_channels;
  for (int i = 0; i < 4; ++i) {
    convs_->push_back(conv(in, widths[i], 4, strides[i], 1));
    // First layer is never normalised.
    if (i > 0 && cfg_.norm == PatchNorm::kInstance) {
      norms_->push_back(torch::nn::InstanceNorm2d(torch::nn::InstanceNorm2dOptions(widths[i])));
    }
    in = widths[i];
  }
  convs_->push_back(conv(in, 1, 4, 1, 1));
  xavier_init();
}

void PatchDiscriminatorImpl::xavier_init() {
  torch::NoGradGuard guard;
  for (auto& m : convs_->children()) {
    auto* c = m->as<torch::nn::Conv2dImpl>();
    torch::nn::init::xavier_normal_(c->weight);
    c->bias.zero_();
  }
}

std::int64_t PatchDiscriminatorImpl::output_size(std::int64_t in) {
  for (std::int64_t s : {2, 2, 2, 1, 1}) in = (in + 2 - 4) / s + 1;
  return in;
}

torch::Tensor PatchDiscriminatorImpl::forward(const torch::Tensor& rgb) {
  constexpr auto kField = DiscriminatorConfig::kReceptiveField;
  if (rgb.dim() != 4 || rgb.size(1) != cfg_.input_channels) {
    throw ShapeError("discriminator expects [N, 3, H, W] input");
  }
  if (rgb.size(2) < kField || rgb.size(3) < kField) {
    throw ShapeError("discriminator input " + std::to_string(rgb.size(2)) + "x" +
                     std::to_string(rgb.size(3)) + " is smaller than its 70x70 receptive field");
  }
  auto x = rgb;
  for (std::size_t i = 0; i < 4; ++i) {
    x = convs_[i]->as<torch::nn::Conv2dImpl>()->forward(x);
    if (i > 0 && cfg_.norm == PatchNorm::kInstance) {
      x = norms_[i - 1]->as<torch::nn::InstanceNorm2dImpl>()->forward(x);
    }
    x = lrelu(x);
  }
  return convs_[4]->as<torch::nn::Conv2dImpl>()->forward(x);
}

}  // namespace hsd::nn
