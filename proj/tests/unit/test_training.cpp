#include <gtest/gtest.h>

#include <torch/torch.h>

#include <filesystem>

#include "hsd/color/srgb.hpp"
#include "hsd/core/sampling.hpp"
#include "hsd/data/synthetic.hpp"
#include "hsd/train/checkpoint.hpp"
#include "hsd/train/training.hpp"

using namespace hsd;
using namespace hsd::train;

namespace {

std::vector<SnapshotMosaic> scenes(int count, std::size_t size, std::uint64_t first_seed = 0) {
  std::vector<SnapshotMosaic> out;
  const auto pattern = MsfaPattern::row_major(4);
  for (int i = 0; i < count; ++i) {
    data::SyntheticSceneConfig sc;
    sc.seed = first_seed + i;
    sc.height = sc.width = size;
    out.push_back(simulate_mosaic(data::generate_synthetic_scene(sc).cube, pattern));
  }
  return out;
}

std::vector<RgbImage> corpus(int count, std::size_t size) {
  std::vector<RgbImage> out;
  for (int i = 0; i < count; ++i) {
    data::SyntheticSceneConfig sc;
    sc.seed = 5000 + i;
    sc.height = sc.width = size;
    out.push_back(fixed_hsi_to_rgb(data::generate_synthetic_scene(sc).cube, cie1931_2deg()));
  }
  return out;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.generator.base_channels = 8;
  c.generator.depth = 2;
  c.rgb.hidden_width = 16;
  c.spectral.channels = 8;
  c.spectral.blocks = 1;
  c.discriminator.base_channels = 4;
  c.batch_size = 2;
  c.crop = 24;
  c.seed = 7;
  return c;
}

bool same_parameters(torch::nn::Module& a, torch::nn::Module& b) {
  const auto pa = a.parameters(), pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (!torch::equal(pa[i], pb[i])) return false;
  return true;
}

}  // namespace

TEST(PretrainPairs, ShapesAndDeterminism) {
  const auto m = scenes(3, 16);
  const auto a = build_pretrain_pairs(m, cie1931_2deg());
  const auto b = build_pretrain_pairs(m, cie1931_2deg());
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].lin.sizes(), (std::vector<std::int64_t>{1, 16, 16, 16}));
  EXPECT_EQ(a[0].rgb.sizes(), (std::vector<std::int64_t>{1, 3, 16, 16}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(torch::equal(a[i].rgb, b[i].rgb));
  EXPECT_THROW(build_pretrain_pairs({}, cie1931_2deg()), ConfigError);
}

TEST(PretrainPairs, ConstantMosaicGivesConstantRgb) {
  SnapshotMosaic flat(8, 8, std::vector<float>(64, 0.4f), MsfaPattern::row_major(4));
  const auto p = build_pretrain_pairs({flat}, cie1931_2deg());
  const auto rgb = p[0].rgb;
  EXPECT_LT((rgb - rgb.mean({2, 3}, true)).abs().max().item<float>(), 1e-6f);
}

TEST(RgbPretraining, ZeroStepsLeavesParametersAlone) {
  auto cfg = tiny_config();
  cfg.pretrain_rgb_steps = 0;
  auto a = make_models(cfg), b = make_models(cfg);
  const auto pairs = build_pretrain_pairs(scenes(4, 24), cie1931_2deg());
  const auto r = pretrain_rgb_converter(pairs, cfg, a.rgb);
  EXPECT_EQ(r.initial_loss, r.final_loss);
  EXPECT_TRUE(same_parameters(*a.rgb, *b.rgb));
}

TEST(RgbPretraining, HeldOutLossDecreasesAndRunsRepeat) {
  auto cfg = tiny_config();
  cfg.pretrain_rgb_steps = 150;
  const auto pairs = build_pretrain_pairs(scenes(16, 24), cie1931_2deg());
  auto a = make_models(cfg), b = make_models(cfg);
  const auto ra = pretrain_rgb_converter(pairs, cfg, a.rgb);
  const auto rb = pretrain_rgb_converter(pairs, cfg, b.rgb);
  EXPECT_LT(ra.final_loss, 0.5 * ra.initial_loss);
  EXPECT_EQ(ra.final_loss, rb.final_loss);
  EXPECT_TRUE(same_parameters(*a.rgb, *b.rgb));
}

TEST(SpectralPretraining, HeldOutLossDecreases) {
  auto cfg = tiny_config();
  cfg.pretrain_spectral_steps = 60;
  cfg.lr_pretrain_spectral = 1e-3;
  const auto pairs = build_pretrain_pairs(scenes(8, 24), cie1931_2deg());
  auto m = make_models(cfg);
  const auto r = pretrain_spectral_recovery(pairs, cfg, m.spectral);
  EXPECT_LT(r.final_loss, r.initial_loss);
}

TEST(DemosaicPretraining, LossDecreasesAndSamplesStayExact) {
  auto cfg = tiny_config();
  cfg.pretrain_demosaic_steps = 60;
  MosaicDataset data(scenes(6, 24));
  auto m = make_models(cfg);
  std::int64_t seen = 0;
  TrainHooks hooks;
  hooks.on_step = [&](const StepInfo& s) {
    ++seen;
    const auto picked = (s.output * s.batch.mask).sum(1, true);
    EXPECT_TRUE(torch::equal(picked, s.batch.mosaic)) << "step " << s.step;
  };
  const auto r = pretrain_demosaicker(data, cfg, m.demosaic, hooks);
  EXPECT_EQ(seen, 60);
  EXPECT_LT(r.final_loss, r.initial_loss);
}

TEST(MosaicDataset, CropsArePhaseAligned) {
  MosaicDataset data(scenes(2, 24));
  auto rng = derive_rng(1, 1);
  for (int i = 0; i < 10; ++i) {
    const auto b = data.sample(rng, 3, 8);
    EXPECT_EQ(b.lin.sizes(), (std::vector<std::int64_t>{3, 16, 8, 8}));
    EXPECT_TRUE(torch::equal((b.lin * b.mask).sum(1, true), b.mosaic));
  }
  EXPECT_THROW(MosaicDataset(std::vector<SnapshotMosaic>{}), ConfigError);
}

TEST(JointFinetune, ZeroStepsReturnsInit) {
  auto cfg = tiny_config();
  cfg.joint_steps = 0;
  cfg.crop = 72;
  auto m = make_models(cfg);
  const auto init = capture(m, cfg, Phase::kPretrained, 0);
  const auto out = joint_finetune(MosaicDataset(scenes(2, 72)), RgbCorpus(corpus(2, 72)), init, cfg);
  EXPECT_EQ(encode_checkpoint(out), encode_checkpoint(init));
}

TEST(JointFinetune, ShortRunIsReproducibleAndKeepsSamples) {
  auto cfg = tiny_config();
  cfg.joint_steps = 3;
  cfg.crop = 72;
  cfg.batch_size = 1;
  cfg.checkpoint_every = 2;
  const MosaicDataset data(scenes(2, 72));
  const RgbCorpus rgb(corpus(2, 72));
  auto m = make_models(cfg);
  const auto init = capture(m, cfg, Phase::kPretrained, 0);
  int checkpoints = 0;
  TrainHooks hooks;
  hooks.on_step = [&](const StepInfo& s) {
    EXPECT_TRUE(torch::equal((s.output * s.batch.mask).sum(1, true), s.batch.mosaic));
    EXPECT_TRUE(std::isfinite(s.d_loss));
  };
  hooks.on_checkpoint = [&](const Checkpoint&) { ++checkpoints; };
  const auto a = joint_finetune(data, rgb, init, cfg, hooks);
  const auto b = joint_finetune(data, rgb, init, cfg);
  EXPECT_EQ(checkpoints, 2);
  EXPECT_EQ(a.phase, Phase::kJoint);
  EXPECT_EQ(a.step, 3);
  EXPECT_FALSE(a.optimizer.empty());
  EXPECT_EQ(encode_checkpoint(a), encode_checkpoint(b));

  // Resuming continues from the saved step.
  cfg.joint_steps = 1;
  cfg.checkpoint_every = 0;
  EXPECT_EQ(joint_finetune(data, rgb, a, cfg).step, 4);
}

TEST(JointFinetune, RejectsSmallCropsForTheDiscriminator) {
  auto cfg = tiny_config();
  cfg.joint_steps = 1;
  cfg.crop = 24;
  auto m = make_models(cfg);
  EXPECT_THROW(joint_finetune(MosaicDataset(scenes(1, 24)), RgbCorpus(corpus(1, 24)),
                              capture(m, cfg, Phase::kPretrained, 0), cfg),
               ShapeError);
}

TEST(Checkpoint, RoundTripRestoresEveryTensor) {
  auto cfg = tiny_config();
  auto m = make_models(cfg);
  const auto c = capture(m, cfg, Phase::kPretrained, 12);
  const auto d = decode_checkpoint(encode_checkpoint(c));
  EXPECT_EQ(d.step, 12);
  EXPECT_EQ(d.model_hash, model_hash(cfg));
  auto fresh = make_models([&] {
    auto other = cfg;
    other.seed = 99;
    return other;
  }());
  EXPECT_FALSE(same_parameters(*fresh.demosaic, *m.demosaic));
  restore(d, fresh);
  EXPECT_TRUE(same_parameters(*fresh.demosaic, *m.demosaic));
  EXPECT_TRUE(same_parameters(*fresh.discriminator, *m.discriminator));

  const auto dir = std::filesystem::temp_directory_path() / "hsd_ckpt_test";
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "c.hck", c);
  EXPECT_EQ(encode_checkpoint(load_checkpoint(dir / "c.hck")), encode_checkpoint(c));
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, RejectsCorruptionAndMismatch) {
  auto cfg = tiny_config();
  auto m = make_models(cfg);
  auto bytes = encode_checkpoint(capture(m, cfg, Phase::kInit, 0));
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  EXPECT_THROW(decode_checkpoint(truncated), ParseError);
  bytes[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bytes), ParseError);

  auto wider = cfg;
  wider.generator.base_channels = 16;
  EXPECT_THROW(require_compatible(capture(m, cfg, Phase::kInit, 0), wider), ConfigError);
  auto retuned = cfg;
  retuned.lr_generator = 1e-3;  // rates do not change the networks
  EXPECT_NO_THROW(require_compatible(capture(m, cfg, Phase::kInit, 0), retuned));
}

TEST(TrainConfig, KeysRoundTrip) {
  TrainConfig c;
  const auto kv = to_key_values(c);
  EXPECT_EQ(kv.at("generator.base_channels"), "32");
  EXPECT_TRUE(kv.count("loss.lambda_tv"));
  TrainConfig d;
  for (const auto& [k, v] : kv) set_key(d, k, v);
  EXPECT_EQ(config_hash(c), config_hash(d));
  set_key(d, "lr.generator", "2e-5");
  EXPECT_NE(config_hash(c), config_hash(d));
  EXPECT_EQ(model_hash(c), model_hash(d));
  EXPECT_THROW(set_key(d, "generator.colour", "1"), ConfigError);
  EXPECT_THROW(set_key(d, "batch_size", "many"), ConfigError);
  set_key(d, "crop", "70");
  EXPECT_THROW(d.validate(), ConfigError);
}
