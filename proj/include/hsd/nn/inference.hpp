#pragma once

#include <torch/torch.h>

#include "hsd/core/sampling.hpp"
#include "hsd/core/types.hpp"
#include "hsd/nn/networks.hpp"
#include "hsd/nn/tensor_bridge.hpp"

namespace hsd::nn {

/// Network demosaicking of one mosaic, from its bilinear cube.
inline Hypercube demosaic_with(DemosaicNet& net, const SnapshotMosaic& mosaic,
                               const std::vector<double>& band_centers = {}) {
  torch::NoGradGuard guard;
  auto lin = linear_demosaic(mosaic, band_centers);
  auto out = net->forward(to_tensor(lin), to_tensor(mosaic),
                          sample_mask(mosaic.pattern(), mosaic.height(), mosaic.width()));
  return to_hypercube(out, lin.band_centers());
}

inline RgbImage to_rgb_with(RgbConverter& net, const Hypercube& cube) {
  torch::NoGradGuard guard;
  return to_rgb_image(net->forward(to_tensor(cube)));
}

}  // namespace hsd::nn
