#include "hsd/nn/tensor_bridge.hpp"

#include <cstring>

#include "hsd/errors.hpp"

namespace hsd::nn {
namespace {

torch::Tensor from_floats(const std::vector<float>& v, std::vector<std::int64_t> shape) {
  auto t = torch::empty(shape, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), v.data(), v.size() * sizeof(float));
  return t;
}

std::vector<float> to_floats(const torch::Tensor& t) {
  auto c = t.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  std::vector<float> v(static_cast<std::size_t>(c.numel()));
  std::memcpy(v.data(), c.data_ptr<float>(), v.size() * sizeof(float));
  return v;
}

}  // namespace

torch::Tensor to_tensor(const Hypercube& cube) {
  return from_floats(cube.values(), {1, static_cast<std::int64_t>(cube.bands()),
                                     static_cast<std::int64_t>(cube.height()),
                                     static_cast<std::int64_t>(cube.width())});
}

torch::Tensor to_tensor(const SnapshotMosaic& mosaic) {
  return from_floats(mosaic.values(), {1, 1, static_cast<std::int64_t>(mosaic.height()),
                                       static_cast<std::int64_t>(mosaic.width())});
}

torch::Tensor to_tensor(const RgbImage& rgb) {
  return from_floats(rgb.values(), {1, 3, static_cast<std::int64_t>(rgb.height()),
                                    static_cast<std::int64_t>(rgb.width())});
}

torch::Tensor sample_mask(const MsfaPattern& pattern, std::int64_t height, std::int64_t width) {
  const auto bands = static_cast<std::int64_t>(pattern.band_count());
  auto mask = torch::zeros({1, bands, height, width}, torch::kBool);
  auto acc = mask.accessor<bool, 4>();
  for (std::int64_t y = 0; y < height; ++y)
    for (std::int64_t x = 0; x < width; ++x)
      acc[0][static_cast<std::int64_t>(pattern.band(y, x))][y][x] = true;
  return mask;
}

Hypercube to_hypercube(const torch::Tensor& t, std::vector<double> band_centers) {
  if (t.dim() != 4) throw ShapeError("expected a [N, B, H, W] tensor");
  const auto first = t[0];
  const auto b = static_cast<std::size_t>(first.size(0));
  if (band_centers.empty()) band_centers = linspace_band_centers(b);
  return Hypercube(b, first.size(1), first.size(2), to_floats(first), std::move(band_centers));
}

RgbImage to_rgb_image(const torch::Tensor& t) {
  if (t.dim() != 4 || t.size(1) != 3) throw ShapeError("expected a [N, 3, H, W] tensor");
  const auto first = t[0];
  return RgbImage(first.size(1), first.size(2), to_floats(first));
}

}  // namespace hsd::nn
