#include "hsd/train/datasets.hpp"

#include "hsd/color/srgb.hpp"
#include "hsd/core/sampling.hpp"
#include "hsd/errors.hpp"
#include "hsd/nn/tensor_bridge.hpp"

namespace hsd::train {
namespace {

std::int64_t pick(std::mt19937_64& rng, std::int64_t n) {
  return std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
}

const MsfaPattern& first_pattern(const std::vector<SnapshotMosaic>& mosaics) {
  if (mosaics.empty()) throw ConfigError("mosaic dataset is empty");
  return mosaics.front().pattern();
}

}  // namespace

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

MosaicDataset::MosaicDataset(const std::vector<SnapshotMosaic>& mosaics) : pattern_(first_pattern(mosaics)) {
  bands_ = static_cast<std::int64_t>(pattern_.band_count());
  period_ = static_cast<std::int64_t>(pattern_.period());
  for (const auto& m : mosaics) {
    if (!(m.pattern() == pattern_)) throw ConfigError("all mosaics in a dataset must share one MSFA pattern");
    lin_.push_back(nn::to_tensor(linear_demosaic(m)));
    mosaic_.push_back(nn::to_tensor(m));
  }
}

MosaicBatch MosaicDataset::item(std::size_t i) const {
  const auto& m = mosaic_.at(i);
  return {lin_[i], m, nn::sample_mask(pattern_, m.size(2), m.size(3))};
}

MosaicBatch MosaicDataset::sample(std::mt19937_64& rng, std::int64_t count, std::int64_t crop) const {
  if (crop % period_ != 0) throw ConfigError("crop side must be a multiple of the MSFA period");
  std::vector<torch::Tensor> lins, mosaics;
  std::int64_t side_h = crop, side_w = crop;
  for (std::int64_t n = 0; n < count; ++n) {
    const auto i = static_cast<std::size_t>(pick(rng, static_cast<std::int64_t>(size())));
    const auto h = lin_[i].size(2), w = lin_[i].size(3);
    if (crop == 0) {
      if (n == 0) side_h = h, side_w = w;
      if (h != side_h || w != side_w) throw ShapeError("whole-image batches need equally sized mosaics");
      lins.push_back(lin_[i]);
      mosaics.push_back(mosaic_[i]);
      continue;
    }
    if (crop > h || crop > w) throw ShapeError("crop larger than a training mosaic");
    const auto y = period_ * pick(rng, (h - crop) / period_ + 1);
    const auto x = period_ * pick(rng, (w - crop) / period_ + 1);
    lins.push_back(lin_[i].slice(2, y, y + crop).slice(3, x, x + crop));
    mosaics.push_back(mosaic_[i].slice(2, y, y + crop).slice(3, x, x + crop));
  }
  return {torch::cat(lins, 0), torch::cat(mosaics, 0), nn::sample_mask(pattern_, side_h, side_w)};
}

RgbCorpus::RgbCorpus(const std::vector<RgbImage>& images) {
  if (images.empty()) throw ConfigError("rgb corpus is empty");
  for (const auto& im : images) images_.push_back(nn::to_tensor(im));
}

torch::Tensor RgbCorpus::sample(std::mt19937_64& rng, std::int64_t count, std::int64_t crop) const {
  std::vector<torch::Tensor> out;
  std::int64_t side_h = crop, side_w = crop;
  for (std::int64_t n = 0; n < count; ++n) {
    const auto& im = images_[static_cast<std::size_t>(pick(rng, static_cast<std::int64_t>(size())))];
    const auto h = im.size(2), w = im.size(3);
    if (crop == 0) {
      if (n == 0) side_h = h, side_w = w;
      if (h != side_h || w != side_w) throw ShapeError("whole-image batches need equally sized images");
      out.push_back(im);
      continue;
    }
    if (crop > h || crop > w) throw ShapeError("crop larger than an rgb corpus image");
    const auto y = pick(rng, h - crop + 1), x = pick(rng, w - crop + 1);
    out.push_back(im.slice(2, y, y + crop).slice(3, x, x + crop));
  }
  return torch::cat(out, 0);
}

std::vector<PretrainPair> build_pretrain_pairs(const std::vector<SnapshotMosaic>& mosaics,
                                               const ColorMatchingTable& cmf) {
  if (mosaics.empty()) throw ConfigError("no mosaics to build pre-training pairs from");
  std::vector<PretrainPair> pairs;
  for (const auto& m : mosaics) {
    auto lin = linear_demosaic(m);
    pairs.push_back({nn::to_tensor(lin), nn::to_tensor(fixed_hsi_to_rgb(lin, cmf))});
  }
  return pairs;
}

}  // namespace hsd::train
