#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <functional>
#include <vector>

#include "hsd/train/checkpoint.hpp"
#include "hsd/train/config.hpp"
#include "hsd/train/datasets.hpp"

namespace hsd::train {

struct StepInfo {
  std::int64_t step = 0;  // 1-based within the current call
  double loss = 0.0;
  double d_loss = 0.0;    // joint fine-tuning only
  nn::LossValues parts;   // joint fine-tuning only
  MosaicBatch batch;      // demosaicker phases only
  torch::Tensor output;   // demosaicked batch, detached
};

struct TrainHooks {
  std::function<void(const StepInfo&)> on_step;
  std::function<void(const Checkpoint&)> on_checkpoint;
};

struct PretrainReport {
  std::int64_t steps = 0;
  double initial_loss = 0.0;  // held-out loss before the first step
  double final_loss = 0.0;    // held-out loss after the last step
};

/// Applies thread count and RNG seeding for a training phase.
void enter_training_mode(const TrainConfig& cfg, std::uint64_t stream);

/// L1 fit of cube -> sRGB on the pairs. The last eighth (at least one pair,
/// when there are two or more) is held out for the report.
PretrainReport pretrain_rgb_converter(const std::vector<PretrainPair>& pairs, const TrainConfig& cfg,
                                      nn::RgbConverter& net, const TrainHooks& hooks = {});

/// L1 fit of sRGB -> cube, same protocol.
PretrainReport pretrain_spectral_recovery(const std::vector<PretrainPair>& pairs, const TrainConfig& cfg,
                                          nn::SpectralRecoveryNet& net, const TrainHooks& hooks = {});

/// Self-supervised SGC + lambda_TV * TV. The report's losses are taken on
/// whole images of the dataset.
PretrainReport pretrain_demosaicker(const MosaicDataset& data, const TrainConfig& cfg, nn::DemosaicNet& net,
                                    const TrainHooks& hooks = {});

/// Runs all three pre-training stages on fresh networks.
Checkpoint pretrain_all(const std::vector<SnapshotMosaic>& mosaics, const ColorMatchingTable& cmf,
                        const TrainConfig& cfg, const TrainHooks& hooks = {});

/// Alternating least-squares adversarial fine-tuning: one discriminator
/// update, then one joint update of the three generators on the weighted
/// total. The mosaic and RGB streams are drawn independently.
Checkpoint joint_finetune(const MosaicDataset& mosaics, const RgbCorpus& rgb_corpus, const Checkpoint& init,
                          const TrainConfig& cfg, const TrainHooks& hooks = {});

}  // namespace hsd::train
