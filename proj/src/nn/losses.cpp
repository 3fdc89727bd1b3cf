#include "hsd/nn/losses.hpp"

#include <cmath>

#include "hsd/errors.hpp"

namespace hsd::nn {
namespace {

void require_cube(const torch::Tensor& t, const char* who) {
  if (t.dim() != 4) throw ShapeError(std::string(who) + " expects a [N, B, H, W] tensor");
}

torch::Tensor dx(const torch::Tensor& t) { return t.narrow(3, 1, t.size(3) - 1) - t.narrow(3, 0, t.size(3) - 1); }
torch::Tensor dy(const torch::Tensor& t) { return t.narrow(2, 1, t.size(2) - 1) - t.narrow(2, 0, t.size(2) - 1); }

torch::Tensor abs_mean_or_zero(const torch::Tensor& t, const torch::Tensor& like) {
  if (t.numel() == 0) return torch::zeros({}, like.options());
  return t.abs().mean();
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {lambda_sgc, lambda_tv, lambda_ips, lambda_gan, lambda_cyc}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("loss weights must be finite and non-negative");
  }
}

torch::Tensor ips_loss(const torch::Tensor& cube, std::int64_t k) {
  require_cube(cube, "ips_loss");
  if (k < 1) throw ShapeError("period must be positive");
  const auto n = cube.size(0), b = cube.size(1), h = cube.size(2), w = cube.size(3);
  if (h % k != 0 || w % k != 0) {
    throw ShapeError("image " + std::to_string(h) + "x" + std::to_string(w) + " not divisible by period " +
                     std::to_string(k));
  }
  // [N, B, H/k, k, W/k, k]: the phase (i, j) sub-image is [..., :, i, :, j].
  auto means = cube.reshape({n, b, h / k, k, w / k, k}).mean({2, 4});
  return means.reshape({n, b, k * k}).var(2, /*unbiased=*/false).mean();
}

torch::Tensor tv_loss(const torch::Tensor& cube) {
  require_cube(cube, "tv_loss");
  return abs_mean_or_zero(dx(cube), cube) + abs_mean_or_zero(dy(cube), cube);
}

torch::Tensor sgc_loss(const torch::Tensor& cube) {
  require_cube(cube, "sgc_loss");
  auto pan = cube.mean(1, /*keepdim=*/true);
  return abs_mean_or_zero(dx(cube) - dx(pan), cube) + abs_mean_or_zero(dy(cube) - dy(pan), cube);
}

SgcFunction sgc_by_name(const std::string& name) {
  if (name == "pan-l1") return [](const torch::Tensor& c) { return sgc_loss(c); };
  throw ConfigError("unknown sgc variant '" + name + "'");
}

std::vector<std::string> sgc_names() { return {"pan-l1"}; }

GanLosses gan_losses(const torch::Tensor& real_scores, const torch::Tensor& fake_scores) {
  return {gan_generator_loss(fake_scores), (real_scores - 1.0).pow(2).mean() + fake_scores.pow(2).mean()};
}

torch::Tensor gan_generator_loss(const torch::Tensor& fake_scores) { return (fake_scores - 1.0).pow(2).mean(); }

torch::Tensor cycle_loss(const torch::Tensor& recovered, const torch::Tensor& demosaicked) {
  if (recovered.sizes() != demosaicked.sizes()) throw ShapeError("cycle_loss shape mismatch");
  return (recovered - demosaicked).abs().mean();
}

torch::Tensor total_loss(const LossComponents& c, const LossWeights& w) {
  const std::pair<const char*, const torch::Tensor*> parts[] = {
      {"sgc", &c.sgc}, {"tv", &c.tv}, {"ips", &c.ips}, {"gan", &c.gan}, {"cyc", &c.cyc}};
  torch::Tensor ref;
  for (const auto& [name, t] : parts) {
    if (!t->defined()) continue;
    if (!std::isfinite(t->detach().to(torch::kDouble).item<double>())) {
      throw DivergenceError(std::string("non-finite ") + name + " loss");
    }
    ref = *t;
  }
  if (!ref.defined()) throw ConfigError("total_loss needs at least one component");
  auto total = torch::zeros({}, ref.options());
  const double weights[] = {w.lambda_sgc, w.lambda_tv, w.lambda_ips, w.lambda_gan, w.lambda_cyc};
  for (int i = 0; i < 5; ++i) {
    if (parts[i].second->defined() && weights[i] != 0.0) total = total + weights[i] * *parts[i].second;
  }
  return total;
}

double total_loss(const LossValues& c, const LossWeights& w) {
  const double v[] = {c.sgc, c.tv, c.ips, c.gan, c.cyc};
  const char* names[] = {"sgc", "tv", "ips", "gan", "cyc"};
  for (int i = 0; i < 5; ++i)
    if (!std::isfinite(v[i])) throw DivergenceError(std::string("non-finite ") + names[i] + " loss");
  return w.lambda_sgc * c.sgc + w.lambda_tv * c.tv + w.lambda_ips * c.ips + w.lambda_gan * c.gan +
         w.lambda_cyc * c.cyc;
}

}  // namespace hsd::nn
