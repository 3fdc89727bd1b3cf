#pragma once

#include <torch/torch.h>

#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/core/types.hpp"

namespace hsd::nn {

/// [1, B, H, W] float32 copy of `cube`.
torch::Tensor to_tensor(const Hypercube& cube);

/// [1, 1, H, W] float32 copy of the mosaic values.
torch::Tensor to_tensor(const SnapshotMosaic& mosaic);

/// [1, 3, H, W] float32 copy.
torch::Tensor to_tensor(const RgbImage& rgb);

/// [1, B, H, W] boolean map, true where pixel (y, x) records band b.
torch::Tensor sample_mask(const MsfaPattern& pattern, std::int64_t height, std::int64_t width);

/// First batch entry of a [N, B, H, W] tensor as a cube.
Hypercube to_hypercube(const torch::Tensor& t, std::vector<double> band_centers = {});

/// First batch entry of a [N, 3, H, W] tensor as an RGB image.
RgbImage to_rgb_image(const torch::Tensor& t);

}  // namespace hsd::nn
