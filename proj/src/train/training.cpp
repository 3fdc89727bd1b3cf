#include "hsd/train/training.hpp"

#include <ATen/Parallel.h>

#include <cmath>

#include "hsd/errors.hpp"
#include "hsd/nn/losses.hpp"

namespace hsd::train {
namespace {

// RNG streams; each phase draws from its own.
enum Stream : std::uint64_t {
  kRgbStream = 1,
  kSpectralStream = 2,
  kDemosaicStream = 3,
  kJointStream = 4,
  kCorpusStream = 5,
};

torch::optim::Adam make_adam(std::vector<torch::Tensor> params, double lr, const AdamSettings& a) {
  return torch::optim::Adam(std::move(params),
                            torch::optim::AdamOptions(lr).betas({a.beta1, a.beta2}).eps(a.eps));
}

double checked(const torch::Tensor& loss, const char* phase, std::int64_t step) {
  const double v = loss.item<double>();
  if (!std::isfinite(v)) {
    throw DivergenceError(std::string(phase) + " loss is not finite at step " + std::to_string(step));
  }
  return v;
}

torch::Tensor random_crop(const torch::Tensor& t, std::int64_t y, std::int64_t x, std::int64_t crop) {
  return crop == 0 ? t : t.slice(2, y, y + crop).slice(3, x, x + crop);
}

struct PairSplit {
  std::vector<const PretrainPair*> train, held;
};

PairSplit split_pairs(const std::vector<PretrainPair>& pairs) {
  if (pairs.empty()) throw ConfigError("no pre-training pairs");
  PairSplit s;
  const std::size_t n = pairs.size();
  const std::size_t held = n < 2 ? 0 : std::max<std::size_t>(1, n / 8);
  for (std::size_t i = 0; i < n; ++i) (i < n - held ? s.train : s.held).push_back(&pairs[i]);
  if (s.held.empty()) s.held = s.train;
  return s;
}

// Shared L1 regression loop for the two colour models. `forward` maps the
// input side of a pair to a prediction of the output side.
template <class Net>
PretrainReport fit_pairs(const std::vector<PretrainPair>& pairs, const TrainConfig& cfg, Net& net,
                         std::int64_t steps, double lr, Stream stream, bool cube_to_rgb, const char* phase,
                         const TrainHooks& hooks) {
  cfg.validate();
  enter_training_mode(cfg, stream);
  auto split = split_pairs(pairs);
  auto rng = derive_rng(cfg.seed, stream);
  auto in_of = [&](const PretrainPair& p) { return cube_to_rgb ? p.lin : p.rgb; };
  auto out_of = [&](const PretrainPair& p) { return cube_to_rgb ? p.rgb : p.lin; };

  auto held_loss = [&] {
    torch::NoGradGuard guard;
    double total = 0.0;
    for (const auto* p : split.held) total += (net->forward(in_of(*p)) - out_of(*p)).abs().mean().template item<double>();
    return total / static_cast<double>(split.held.size());
  };

  auto draw = [&] {
    std::vector<torch::Tensor> xs, ys;
    for (std::int64_t n = 0; n < cfg.batch_size; ++n) {
      const auto& p = *split.train[std::uniform_int_distribution<std::size_t>(0, split.train.size() - 1)(rng)];
      const auto h = p.lin.size(2), w = p.lin.size(3);
      const auto crop = (cfg.crop > 0 && cfg.crop <= h && cfg.crop <= w) ? cfg.crop : 0;
      std::int64_t y = 0, x = 0;
      if (crop) {
        y = std::uniform_int_distribution<std::int64_t>(0, h - crop)(rng);
        x = std::uniform_int_distribution<std::int64_t>(0, w - crop)(rng);
      }
      xs.push_back(random_crop(in_of(p), y, x, crop));
      ys.push_back(random_crop(out_of(p), y, x, crop));
    }
    return std::make_pair(torch::cat(xs, 0), torch::cat(ys, 0));
  };

  PretrainReport report;
  report.initial_loss = held_loss();
  auto opt = make_adam(net->parameters(), lr, cfg.adam);
  for (std::int64_t step = 1; step <= steps; ++step) {
    auto [x, y] = draw();
    opt.zero_grad();
    auto loss = (net->forward(x) - y).abs().mean();
    const double v = checked(loss, phase, step);
    loss.backward();
    opt.step();
    if (hooks.on_step) {
      StepInfo info;
      info.step = step;
      info.loss = v;
      hooks.on_step(info);
    }
  }
  report.steps = steps;
  report.final_loss = steps == 0 ? report.initial_loss : held_loss();
  return report;
}

}  // namespace

void enter_training_mode(const TrainConfig& cfg, std::uint64_t stream) {
  if (cfg.deterministic) at::set_num_threads(1);
  torch::manual_seed(derive_rng(cfg.seed, 1000 + stream)());
}

PretrainReport pretrain_rgb_converter(const std::vector<PretrainPair>& pairs, const TrainConfig& cfg,
                                      nn::RgbConverter& net, const TrainHooks& hooks) {
  return fit_pairs(pairs, cfg, net, cfg.pretrain_rgb_steps, cfg.lr_pretrain_rgb, kRgbStream, true,
                   "rgb pre-training", hooks);
}

PretrainReport pretrain_spectral_recovery(const std::vector<PretrainPair>& pairs, const TrainConfig& cfg,
                                          nn::SpectralRecoveryNet& net, const TrainHooks& hooks) {
  return fit_pairs(pairs, cfg, net, cfg.pretrain_spectral_steps, cfg.lr_pretrain_spectral, kSpectralStream,
                   false, "spectral pre-training", hooks);
}

PretrainReport pretrain_demosaicker(const MosaicDataset& data, const TrainConfig& cfg, nn::DemosaicNet& net,
                                    const TrainHooks& hooks) {
  cfg.validate();
  if (data.bands() != cfg.generator.bands || data.period() != cfg.period) {
    throw ConfigError("dataset bands/period do not match the configuration");
  }
  enter_training_mode(cfg, kDemosaicStream);
  const auto sgc = nn::sgc_by_name(cfg.sgc);
  const auto& w = cfg.weights;
  auto objective = [&](const torch::Tensor& out) { return w.lambda_sgc * sgc(out) + w.lambda_tv * nn::tv_loss(out); };

  auto full_loss = [&] {
    torch::NoGradGuard guard;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto b = data.item(i);
      total += objective(net->forward(b.lin, b.mosaic, b.mask)).item<double>();
    }
    return total / static_cast<double>(data.size());
  };

  auto rng = derive_rng(cfg.seed, kDemosaicStream);
  Prefetcher<MosaicBatch> batches([&] { return data.sample(rng, cfg.batch_size, cfg.crop); }, cfg.prefetch);

  PretrainReport report;
  report.initial_loss = full_loss();
  auto opt = make_adam(net->parameters(), cfg.lr_pretrain_demosaic, cfg.adam);
  for (std::int64_t step = 1; step <= cfg.pretrain_demosaic_steps; ++step) {
    auto b = batches.next();
    opt.zero_grad();
    auto out = net->forward(b.lin, b.mosaic, b.mask);
    auto loss = objective(out);
    const double v = checked(loss, "demosaic pre-training", step);
    loss.backward();
    opt.step();
    if (hooks.on_step) {
      StepInfo info;
      info.step = step;
      info.loss = v;
      info.batch = b;
      info.output = out.detach();
      hooks.on_step(info);
    }
  }
  report.steps = cfg.pretrain_demosaic_steps;
  report.final_loss = report.steps == 0 ? report.initial_loss : full_loss();
  return report;
}

Checkpoint pretrain_all(const std::vector<SnapshotMosaic>& mosaics, const ColorMatchingTable& cmf,
                        const TrainConfig& cfg, const TrainHooks& hooks) {
  auto models = make_models(cfg);
  const auto pairs = build_pretrain_pairs(mosaics, cmf);
  pretrain_rgb_converter(pairs, cfg, models.rgb, hooks);
  pretrain_spectral_recovery(pairs, cfg, models.spectral, hooks);
  MosaicDataset data(mosaics);
  pretrain_demosaicker(data, cfg, models.demosaic, hooks);
  return capture(models, cfg, Phase::kPretrained, 0);
}

Checkpoint joint_finetune(const MosaicDataset& mosaics, const RgbCorpus& rgb_corpus, const Checkpoint& init,
                          const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  require_compatible(init, cfg);
  if (mosaics.bands() != cfg.generator.bands || mosaics.period() != cfg.period) {
    throw ConfigError("dataset bands/period do not match the configuration");
  }
  if (rgb_corpus.size() == 0) throw ConfigError("rgb corpus is empty");
  if (cfg.joint_steps == 0) return init;

  auto models = make_models(cfg);
  restore(init, models);
  enter_training_mode(cfg, kJointStream);
  const bool resume = init.phase == Phase::kJoint;
  if (!resume) models.discriminator->xavier_init();

  auto& G = models.demosaic;
  auto& R = models.rgb;
  auto& S = models.spectral;
  auto& D = models.discriminator;
  auto opt_g = make_adam(G->parameters(), cfg.lr_generator, cfg.adam);
  auto opt_r = make_adam(R->parameters(), cfg.lr_rgb, cfg.adam);
  auto opt_s = make_adam(S->parameters(), cfg.lr_spectral, cfg.adam);
  auto opt_d = make_adam(D->parameters(), cfg.lr_discriminator, cfg.adam);
  if (resume) {
    restore_adam(opt_g, init.optimizer, "g");
    restore_adam(opt_r, init.optimizer, "rgb");
    restore_adam(opt_s, init.optimizer, "spectral");
    restore_adam(opt_d, init.optimizer, "d");
  }

  auto snapshot = [&](std::int64_t step) {
    auto c = capture(models, cfg, Phase::kJoint, step);
    for (auto* part : {&opt_g, &opt_r, &opt_s, &opt_d}) {
      const char* prefix = part == &opt_g ? "g" : part == &opt_r ? "rgb" : part == &opt_s ? "spectral" : "d";
      auto s = capture_adam(*part, prefix);
      c.optimizer.insert(c.optimizer.end(), s.begin(), s.end());
    }
    return c;
  };

  const auto sgc = nn::sgc_by_name(cfg.sgc);
  const auto first = resume ? init.step : 0;
  // Independent streams: the two datasets are never indexed together.
  auto mosaic_rng = derive_rng(cfg.seed ^ static_cast<std::uint64_t>(first), kJointStream);
  auto corpus_rng = derive_rng(cfg.seed ^ static_cast<std::uint64_t>(first), kCorpusStream);
  Prefetcher<MosaicBatch> batches([&] { return mosaics.sample(mosaic_rng, cfg.batch_size, cfg.crop); },
                                  cfg.prefetch);
  Prefetcher<torch::Tensor> reals([&] { return rgb_corpus.sample(corpus_rng, cfg.batch_size, cfg.crop); },
                                  cfg.prefetch);

  for (std::int64_t i = 1; i <= cfg.joint_steps; ++i) {
    const auto step = first + i;
    auto b = batches.next();
    auto real = reals.next();

    // Discriminator update.
    torch::Tensor fake_rgb;
    {
      torch::NoGradGuard guard;
      fake_rgb = R->forward(G->forward(b.lin, b.mosaic, b.mask));
    }
    opt_d.zero_grad();
    auto d_loss = nn::gan_losses(D->forward(real), D->forward(fake_rgb)).discriminator;
    const double d_value = checked(d_loss, "discriminator", step);
    d_loss.backward();
    opt_d.step();

    // Joint generator update.
    opt_g.zero_grad();
    opt_r.zero_grad();
    opt_s.zero_grad();
    auto demos = G->forward(b.lin, b.mosaic, b.mask);
    auto rgb = R->forward(demos);
    auto recovered = S->forward(rgb);
    nn::LossComponents parts{sgc(demos), nn::tv_loss(demos), nn::ips_loss(demos, cfg.period),
                             nn::gan_generator_loss(D->forward(rgb)), nn::cycle_loss(recovered, demos)};
    auto total = nn::total_loss(parts, cfg.weights);
    const double value = checked(total, "joint", step);
    total.backward();
    opt_g.step();
    opt_r.step();
    opt_s.step();

    if (hooks.on_step) {
      StepInfo info;
      info.step = i;
      info.loss = value;
      info.d_loss = d_value;
      info.parts = {parts.sgc.item<double>(), parts.tv.item<double>(), parts.ips.item<double>(),
                    parts.gan.item<double>(), parts.cyc.item<double>()};
      info.batch = b;
      info.output = demos.detach();
      hooks.on_step(info);
    }
    if (cfg.checkpoint_every > 0 && i % cfg.checkpoint_every == 0 && i != cfg.joint_steps) {
      auto c = snapshot(step);
      if (!cfg.checkpoint_dir.empty()) {
        save_checkpoint(std::filesystem::path(cfg.checkpoint_dir) / ("step_" + std::to_string(step) + ".hck"), c);
      }
      if (hooks.on_checkpoint) hooks.on_checkpoint(c);
    }
  }
  auto final_checkpoint = snapshot(first + cfg.joint_steps);
  if (hooks.on_checkpoint) hooks.on_checkpoint(final_checkpoint);
  return final_checkpoint;
}

}  // namespace hsd::train
