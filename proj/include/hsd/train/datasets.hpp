#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <vector>

#include "hsd/color/cmf.hpp"
#include "hsd/core/types.hpp"

namespace hsd::train {

/// One training batch drawn from snapshot mosaics.
struct MosaicBatch {
  torch::Tensor lin;     // [N, B, c, c] bilinear cubes
  torch::Tensor mosaic;  // [N, 1, c, c]
  torch::Tensor mask;    // [1, B, c, c]; crops are phase aligned so one mask serves the batch
};

/// Snapshot mosaics with their bilinear cubes precomputed. Crops start on
/// multiples of the MSFA period so the band map is preserved.
class MosaicDataset {
 public:
  explicit MosaicDataset(const std::vector<SnapshotMosaic>& mosaics);

  std::size_t size() const { return lin_.size(); }
  std::int64_t bands() const { return bands_; }
  std::int64_t period() const { return period_; }
  const MsfaPattern& pattern() const { return pattern_; }

  /// Whole image `i` as a batch of one.
  MosaicBatch item(std::size_t i) const;

  /// `count` random crops of side `crop` (0 = whole images, all of equal size).
  MosaicBatch sample(std::mt19937_64& rng, std::int64_t count, std::int64_t crop) const;

 private:
  std::vector<torch::Tensor> lin_, mosaic_;
  MsfaPattern pattern_;
  std::int64_t bands_ = 0, period_ = 0;
};

/// Unpaired RGB images. Nothing links an entry here to any mosaic.
class RgbCorpus {
 public:
  explicit RgbCorpus(const std::vector<RgbImage>& images);
  std::size_t size() const { return images_.size(); }
  torch::Tensor sample(std::mt19937_64& rng, std::int64_t count, std::int64_t crop) const;

 private:
  std::vector<torch::Tensor> images_;
};

/// (linear cube, fixed sRGB) training pair.
struct PretrainPair {
  torch::Tensor lin;  // [1, B, H, W]
  torch::Tensor rgb;  // [1, 3, H, W]
};

/// Bilinear demosaic then fixed colorimetric conversion, per mosaic.
std::vector<PretrainPair> build_pretrain_pairs(const std::vector<SnapshotMosaic>& mosaics,
                                               const ColorMatchingTable& cmf);

/// Draws batches from `draw` one step ahead on a worker thread. The draw order
/// is the call order, so output is identical with or without prefetching.
template <class Batch>
class Prefetcher {
 public:
  Prefetcher(std::function<Batch()> draw, bool enabled) : draw_(std::move(draw)), enabled_(enabled) {}

  Batch next() {
    if (!enabled_) return draw_();
    Batch b = pending_.valid() ? pending_.get() : draw_();
    pending_ = std::async(std::launch::async, draw_);
    return b;
  }

  ~Prefetcher() {
    if (pending_.valid()) pending_.wait();
  }

 private:
  std::function<Batch()> draw_;
  bool enabled_;
  std::future<Batch> pending_;
};

/// Independent generator streams derived from one seed.
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace hsd::train
