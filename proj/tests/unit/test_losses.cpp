#include <gtest/gtest.h>

#include <torch/torch.h>

#include <random>

#include "hsd/core/sampling.hpp"
#include "hsd/nn/losses.hpp"
#include "hsd/nn/tensor_bridge.hpp"

using namespace hsd;
using namespace hsd::nn;

namespace {

torch::Tensor crafted_ips_cube() {
  auto c = torch::zeros({1, 1, 8, 8}, torch::kDouble);
  for (int y = 0; y < 8; y += 4)
    for (int x = 0; x < 8; x += 4) c[0][0][y][x] = 1.0;
  return c;
}

double scalar(const torch::Tensor& t) { return t.item<double>(); }

// Relative error of the autograd gradient of `f` against central differences,
// double precision, measured as ||g - g_fd|| / ||g_fd||.
double gradient_error(const std::function<torch::Tensor(const torch::Tensor&)>& f, torch::Tensor x) {
  x = x.to(torch::kDouble).detach().requires_grad_(true);
  const auto analytic = torch::autograd::grad({f(x)}, {x})[0];
  auto numeric = torch::zeros_like(analytic);
  torch::NoGradGuard guard;
  auto p = x.detach().clone();
  auto v = p.view(-1);
  const double eps = 1e-6;
  for (std::int64_t i = 0; i < p.numel(); ++i) {
    const double orig = v[i].item<double>();
    v[i] = orig + eps;
    const double up = scalar(f(p));
    v[i] = orig - eps;
    const double down = scalar(f(p));
    v[i] = orig;
    numeric.view(-1)[i] = (up - down) / (2 * eps);
  }
  return scalar((analytic - numeric).norm() / numeric.norm());
}

torch::Tensor random_input(std::uint64_t seed) {
  torch::manual_seed(seed);
  return torch::rand({1, 16, 8, 8}, torch::kDouble);
}

}  // namespace

TEST(Losses, ZeroOnDegenerateInputs) {
  const auto flat = torch::full({2, 16, 8, 8}, 0.3, torch::kDouble);
  EXPECT_EQ(scalar(ips_loss(flat, 4)), 0.0);
  EXPECT_EQ(scalar(tv_loss(flat)), 0.0);
  // Bands sharing one spatial pattern up to an offset have identical gradients.
  // Dyadic values keep every sum exact.
  auto shared = torch::floor(random_input(1).narrow(1, 0, 1) * 8) / 8;
  shared = shared.repeat({1, 16, 1, 1}) + torch::arange(16, torch::kDouble).view({1, 16, 1, 1}) / 64;
  EXPECT_EQ(scalar(sgc_loss(shared)), 0.0);
  const auto ones = torch::ones({1, 1, 6, 6}, torch::kDouble);
  EXPECT_EQ(scalar(gan_generator_loss(ones)), 0.0);
  EXPECT_EQ(scalar(gan_losses(ones, torch::zeros_like(ones)).discriminator), 0.0);
  EXPECT_EQ(scalar(cycle_loss(flat, flat)), 0.0);
}

TEST(Losses, ExactValues) {
  EXPECT_DOUBLE_EQ(scalar(ips_loss(crafted_ips_cube(), 4)), 15.0 / 256.0);
  // [0, 1] in one row: horizontal mean 1, no vertical pairs.
  EXPECT_DOUBLE_EQ(scalar(tv_loss(torch::tensor({0.0, 1.0}, torch::kDouble).view({1, 1, 1, 2}))), 1.0);
  const auto zeros = torch::zeros({1, 1, 4, 4}, torch::kDouble);
  const auto g = gan_losses(zeros, torch::ones_like(zeros));
  EXPECT_DOUBLE_EQ(scalar(g.discriminator), 2.0);
  EXPECT_DOUBLE_EQ(scalar(g.generator), 0.0);
  EXPECT_DOUBLE_EQ(scalar(gan_generator_loss(zeros)), 1.0);
  EXPECT_DOUBLE_EQ(scalar(cycle_loss(torch::full({1, 16, 2, 2}, 0.5, torch::kDouble),
                                     torch::full({1, 16, 2, 2}, 0.25, torch::kDouble))),
                   0.25);
  // Two bands, one horizontal step of 1 in band 0 only: pan step 0.5, per band |0.5|.
  auto two = torch::zeros({1, 2, 1, 2}, torch::kDouble);
  two[0][0][0][1] = 1.0;
  EXPECT_DOUBLE_EQ(scalar(sgc_loss(two)), 0.5);
}

TEST(Losses, IpsAgreesWithCoreMetric) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Hypercube cube(16, 12, 16);
  for (auto& v : cube.values()) v = u(rng);
  EXPECT_NEAR(scalar(ips_loss(to_tensor(cube).to(torch::kDouble), 4)), ips_metric(cube, 4), 1e-9);
}

TEST(Losses, Invariances) {
  const auto x = random_input(2);
  EXPECT_NEAR(scalar(ips_loss(x + 0.2, 4)), scalar(ips_loss(x, 4)), 1e-12);
  EXPECT_NEAR(scalar(tv_loss(x + 0.2)), scalar(tv_loss(x)), 1e-12);
  EXPECT_NEAR(scalar(sgc_loss(x + 0.2)), scalar(sgc_loss(x)), 1e-12);
  // Batch averaging: duplicating the batch leaves every loss unchanged.
  const auto xx = torch::cat({x, x}, 0);
  EXPECT_NEAR(scalar(ips_loss(xx, 4)), scalar(ips_loss(x, 4)), 1e-12);
  EXPECT_NEAR(scalar(sgc_loss(xx)), scalar(sgc_loss(x)), 1e-12);
  EXPECT_NEAR(scalar(tv_loss(x.flip({3}))), scalar(tv_loss(x)), 1e-12);
}

TEST(Losses, ShapeAndNameErrors) {
  EXPECT_THROW(ips_loss(torch::rand({1, 2, 6, 8}), 4), ShapeError);
  EXPECT_THROW(tv_loss(torch::rand({2, 8, 8})), ShapeError);
  EXPECT_THROW(cycle_loss(torch::rand({1, 2, 4, 4}), torch::rand({1, 3, 4, 4})), ShapeError);
  EXPECT_THROW(sgc_by_name("sobel"), ConfigError);
  EXPECT_EQ(sgc_names(), std::vector<std::string>{"pan-l1"});
  const auto x = random_input(3);
  EXPECT_EQ(scalar(sgc_by_name("pan-l1")(x)), scalar(sgc_loss(x)));
}

TEST(Losses, TotalIsWeightedSum) {
  const auto one = torch::ones({}, torch::kDouble);
  LossComponents c{one, one, one, one, 2 * one};
  EXPECT_NEAR(scalar(total_loss(c, LossWeights{})), 1.0 + 1e-3 + 1.0 + 0.1 + 2.0, 1e-12);
  EXPECT_NEAR(total_loss(LossValues{1, 1, 1, 1, 2}, LossWeights{}), 1.0 + 1e-3 + 1.0 + 0.1 + 2.0, 1e-12);
  c.tv = torch::full({}, std::nan(""), torch::kDouble);
  EXPECT_THROW(total_loss(c, LossWeights{}), DivergenceError);
  EXPECT_THROW(total_loss(LossValues{1, INFINITY, 0, 0, 0}, LossWeights{}), DivergenceError);
  LossWeights bad;
  bad.lambda_gan = -1;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(LossGradients, Ips) {
  EXPECT_LT(gradient_error([](const torch::Tensor& t) { return ips_loss(t, 4); }, random_input(10)), 1e-4);
}

TEST(LossGradients, Tv) {
  EXPECT_LT(gradient_error([](const torch::Tensor& t) { return tv_loss(t); }, random_input(11)), 1e-4);
}

TEST(LossGradients, Sgc) {
  EXPECT_LT(gradient_error([](const torch::Tensor& t) { return sgc_loss(t); }, random_input(12)), 1e-4);
}

TEST(LossGradients, GanBothSides) {
  const auto other = random_input(13);
  EXPECT_LT(gradient_error([&](const torch::Tensor& t) { return gan_losses(other, t).discriminator; },
                           random_input(14)),
            1e-4);
  EXPECT_LT(gradient_error([&](const torch::Tensor& t) { return gan_losses(t, other).discriminator; },
                           random_input(15)),
            1e-4);
  EXPECT_LT(gradient_error([](const torch::Tensor& t) { return gan_generator_loss(t); }, random_input(16)), 1e-4);
}

TEST(LossGradients, Cycle) {
  const auto target = random_input(17);
  EXPECT_LT(gradient_error([&](const torch::Tensor& t) { return cycle_loss(t, target); }, random_input(18)), 1e-4);
}

TEST(LossGradients, Total) {
  const auto target = random_input(19);
  const auto f = [&](const torch::Tensor& t) {
    LossComponents c{sgc_loss(t), tv_loss(t), ips_loss(t, 4), gan_generator_loss(t), cycle_loss(t, target)};
    return total_loss(c, LossWeights{});
  };
  EXPECT_LT(gradient_error(f, random_input(20)), 1e-4);
}
