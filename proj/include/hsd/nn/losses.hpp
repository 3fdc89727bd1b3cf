#pragma once

#include <torch/torch.h>

#include <functional>
#include <string>
#include <vector>

namespace hsd::nn {

struct LossWeights {
  double lambda_sgc = 1.0;
  double lambda_tv = 1e-3;
  double lambda_ips = 1.0;
  double lambda_gan = 0.1;
  double lambda_cyc = 1.0;

  void validate() const;
};

// All cube losses take [N, B, H, W] tensors and average over the batch.

/// Mean over bands of the population variance of the k*k phase sub-image means.
torch::Tensor ips_loss(const torch::Tensor& cube, std::int64_t k);

/// Anisotropic TV with forward differences. A direction with no valid
/// differences contributes 0.
torch::Tensor tv_loss(const torch::Tensor& cube);

/// Default SGC: per band, L1 between its forward-difference gradients and
/// those of the band-mean image, averaged over bands.
torch::Tensor sgc_loss(const torch::Tensor& cube);

using SgcFunction = std::function<torch::Tensor(const torch::Tensor&)>;

/// Named SGC implementations. "pan-l1" is the default above.
SgcFunction sgc_by_name(const std::string& name);
std::vector<std::string> sgc_names();

struct GanLosses {
  torch::Tensor generator;
  torch::Tensor discriminator;
};

/// Least-squares objectives: D = mean((r - 1)^2) + mean(f^2), G = mean((f - 1)^2).
GanLosses gan_losses(const torch::Tensor& real_scores, const torch::Tensor& fake_scores);

/// Generator side only, for use when no real batch is at hand.
torch::Tensor gan_generator_loss(const torch::Tensor& fake_scores);

/// Mean absolute difference.
torch::Tensor cycle_loss(const torch::Tensor& recovered, const torch::Tensor& demosaicked);

struct LossComponents {
  torch::Tensor sgc, tv, ips, gan, cyc;
};

/// Weighted sum. Raises DivergenceError if any component is not finite.
torch::Tensor total_loss(const LossComponents& c, const LossWeights& w);

struct LossValues {
  double sgc = 0, tv = 0, ips = 0, gan = 0, cyc = 0;
};

double total_loss(const LossValues& c, const LossWeights& w);

}  // namespace hsd::nn
