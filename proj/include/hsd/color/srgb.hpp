#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hsd/color/cmf.hpp"
#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"

namespace hsd {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Linear sRGB -> CIE XYZ (D65).
inline constexpr Mat3 kLinearSrgbToXyz = {{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

inline Mat3 invert(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

inline const Mat3& xyz_to_linear_srgb_matrix() {
  static const Mat3 m = invert(kLinearSrgbToXyz);
  return m;
}

/// D65 reference white, i.e. the XYZ of linear sRGB (1, 1, 1).
inline std::array<double, 3> reference_white_xyz() {
  std::array<double, 3> w{};
  for (int r = 0; r < 3; ++r) w[r] = kLinearSrgbToXyz[r][0] + kLinearSrgbToXyz[r][1] + kLinearSrgbToXyz[r][2];
  return w;
}

/// sRGB opto-electronic transfer function.
inline double srgb_gamma(double linear) {
  return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

/// Integration widths: half the distance between neighbouring band centres on
/// each side, mirrored at the two ends.
inline std::vector<double> band_widths(const std::vector<double>& centers) {
  const auto n = centers.size();
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t b = 0; b < n; ++b) {
    const double left = b == 0 ? centers[1] - centers[0] : centers[b] - centers[b - 1];
    const double right = b + 1 == n ? centers[n - 1] - centers[n - 2] : centers[b + 1] - centers[b];
    w[b] = 0.5 * (left + right);
  }
  return w;
}

/// Per-band XYZ weights, scaled per channel so that a flat unit spectrum
/// integrates to the D65 reference white.
struct SpectralWeights {
  std::vector<std::array<double, 3>> per_band;
};

inline SpectralWeights spectral_weights(const std::vector<double>& band_centers,
                                        const ColorMatchingTable& cmf) {
  const auto widths = band_widths(band_centers);
  SpectralWeights out;
  out.per_band.resize(band_centers.size());
  std::array<double, 3> flat{0.0, 0.0, 0.0};
  for (std::size_t b = 0; b < band_centers.size(); ++b) {
    const auto s = cmf.sample(band_centers[b]);
    for (int c = 0; c < 3; ++c) {
      out.per_band[b][c] = s[c] * widths[b];
      flat[c] += out.per_band[b][c];
    }
  }
  const auto white = reference_white_xyz();
  for (int c = 0; c < 3; ++c) {
    if (!(flat[c] > 0.0)) throw ConfigError("band centres see no colour-matching response");
    const double scale = white[c] / flat[c];
    for (auto& w : out.per_band) w[c] *= scale;
  }
  return out;
}

/// White-normalised XYZ image (3 x H x W, channel-major), before any clamping.
inline std::vector<double> hsi_to_xyz(const Hypercube& cube, const ColorMatchingTable& cmf) {
  const auto weights = spectral_weights(cube.band_centers(), cmf);
  const auto n = cube.plane_size();
  std::vector<double> xyz(3 * n, 0.0);
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    const auto plane = cube.band(b);
    for (int c = 0; c < 3; ++c) {
      const double w = weights.per_band[b][c];
      double* dst = xyz.data() + c * n;
      for (std::size_t i = 0; i < n; ++i) dst[i] += w * plane[i];
    }
  }
  return xyz;
}

/// Physics-based rendering: spectrum -> XYZ -> linear sRGB -> gamma, clamped
/// to [0, 1].
inline RgbImage fixed_hsi_to_rgb(const Hypercube& cube, const ColorMatchingTable& cmf) {
  const auto xyz = hsi_to_xyz(cube, cmf);
  const auto& m = xyz_to_linear_srgb_matrix();
  const auto n = cube.plane_size();
  RgbImage rgb(cube.height(), cube.width());
  auto& out = rgb.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double X = xyz[i], Y = xyz[n + i], Z = xyz[2 * n + i];
    for (int c = 0; c < 3; ++c) {
      const double lin = m[c][0] * X + m[c][1] * Y + m[c][2] * Z;
      out[c * n + i] = static_cast<float>(std::clamp(srgb_gamma(std::clamp(lin, 0.0, 1.0)), 0.0, 1.0));
    }
  }
  return rgb;
}

}  // namespace hsd
