#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"

namespace hsd {

/// Samples `cube` through `pattern`: out[y, x] = cube[band(y, x), y, x].
inline SnapshotMosaic simulate_mosaic(const Hypercube& cube, const MsfaPattern& pattern) {
  if (cube.bands() != pattern.band_count()) {
    throw ShapeError("cube has " + std::to_string(cube.bands()) + " bands but the pattern has " +
                     std::to_string(pattern.band_count()));
  }
  const auto h = cube.height();
  const auto w = cube.width();
  std::vector<float> values(h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) values[y * w + x] = cube.at(pattern.band(y, x), y, x);
  return SnapshotMosaic(h, w, std::move(values), pattern);
}

/// Replaces every sampled entry of `cube` with the raw mosaic value.
///
/// After this call out[band(y, x), y, x] == mosaic[y, x] bit-exactly; all
/// other entries are copied from `cube`. Idempotent.
inline Hypercube override_samples(Hypercube cube, const SnapshotMosaic& mosaic) {
  if (cube.bands() != mosaic.pattern().band_count() || cube.height() != mosaic.height() ||
      cube.width() != mosaic.width()) {
    throw ShapeError("cannot override a " + std::to_string(cube.bands()) + "x" +
                     std::to_string(cube.height()) + "x" + std::to_string(cube.width()) +
                     " cube with a " + std::to_string(mosaic.height()) + "x" +
                     std::to_string(mosaic.width()) + " mosaic of " +
                     std::to_string(mosaic.pattern().band_count()) + " bands");
  }
  for (std::size_t y = 0; y < mosaic.height(); ++y)
    for (std::size_t x = 0; x < mosaic.width(); ++x) cube.at(mosaic.band(y, x), y, x) = mosaic.at(y, x);
  return cube;
}

namespace detail {

// Bilinear interpolation of one sparse phase grid (samples at
// (phase_y + k*i, phase_x + k*j)) onto the full grid. Coordinates outside
// the sample hull clamp to the nearest sample row/column.
inline void interpolate_phase(const SnapshotMosaic& mosaic, std::size_t phase_y,
                              std::size_t phase_x, std::span<double> out) {
  const auto k = mosaic.pattern().period();
  const auto h = mosaic.height();
  const auto w = mosaic.width();
  const std::size_t ny = h / k;
  const std::size_t nx = w / k;
  auto sample = [&](std::size_t i, std::size_t j) -> double {
    return mosaic.at(phase_y + k * i, phase_x + k * j);
  };

  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [k](std::size_t pos, std::size_t phase, std::size_t n) {
    const double f = std::clamp((static_cast<double>(pos) - static_cast<double>(phase)) /
                                    static_cast<double>(k),
                                0.0, static_cast<double>(n - 1));
    const auto lo = static_cast<std::size_t>(std::floor(f));
    const auto hi = std::min(lo + 1, n - 1);
    return Tap{lo, hi, f - static_cast<double>(lo)};
  };

  std::vector<Tap> col_taps(w);
  for (std::size_t x = 0; x < w; ++x) col_taps[x] = taps(x, phase_x, nx);
  for (std::size_t y = 0; y < h; ++y) {
    const Tap ty = taps(y, phase_y, ny);
    for (std::size_t x = 0; x < w; ++x) {
      const Tap& tx = col_taps[x];
      const double top = sample(ty.lo, tx.lo) * (1.0 - tx.frac) + sample(ty.lo, tx.hi) * tx.frac;
      const double bot = sample(ty.hi, tx.lo) * (1.0 - tx.frac) + sample(ty.hi, tx.hi) * tx.frac;
      out[y * w + x] += top * (1.0 - ty.frac) + bot * ty.frac;
    }
  }
}

}  // namespace detail

/// Bilinear demosaicking. Each band is interpolated over its own sparse
/// sample grid with edge replication at the borders; bands sampled at several
/// tile phases average the per-phase interpolants. Sampled pixels keep their
/// raw value exactly.
inline Hypercube linear_demosaic(const SnapshotMosaic& mosaic,
                                 std::vector<double> band_centers = {}) {
  const auto& pattern = mosaic.pattern();
  const auto bands = pattern.band_count();
  if (band_centers.empty()) band_centers = linspace_band_centers(bands);
  Hypercube cube(bands, mosaic.height(), mosaic.width(),
                 std::vector<float>(bands * mosaic.height() * mosaic.width()),
                 std::move(band_centers));

  std::vector<double> acc(cube.plane_size());
  for (std::size_t b = 0; b < bands; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto phases = pattern.phases_of(b);
    for (const auto& [py, px] : phases) detail::interpolate_phase(mosaic, py, px, acc);
    auto plane = cube.band(b);
    const double inv = 1.0 / static_cast<double>(phases.size());
    for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = static_cast<float>(acc[i] * inv);
  }
  return override_samples(std::move(cube), mosaic);
}

/// Splits an H x W image into k*k phase sub-images of size (H/k) x (W/k).
/// Sub-image i*k + j holds image[k*y + i, k*x + j].
template <typename T>
std::vector<std::vector<T>> inverse_pixel_shuffle(std::span<const T> image, std::size_t height,
                                                  std::size_t width, std::size_t k) {
  if (k == 0 || height % k != 0 || width % k != 0) {
    throw ShapeError("image " + std::to_string(height) + "x" + std::to_string(width) +
                     " is not divisible by shuffle factor " + std::to_string(k));
  }
  if (image.size() != height * width) throw ShapeError("image span does not match its size");
  const std::size_t sh = height / k;
  const std::size_t sw = width / k;
  std::vector<std::vector<T>> subs(k * k, std::vector<T>(sh * sw));
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      subs[(y % k) * k + (x % k)][(y / k) * sw + (x / k)] = image[y * width + x];
  return subs;
}

/// Reassembles sub-images produced by inverse_pixel_shuffle into an
/// (sub_height*k) x (sub_width*k) image.
template <typename T>
std::vector<T> pixel_shuffle(const std::vector<std::vector<T>>& subs, std::size_t sub_height,
                             std::size_t sub_width, std::size_t k) {
  if (k == 0 || subs.size() != k * k) throw ShapeError("expected k*k sub-images");
  for (const auto& s : subs)
    if (s.size() != sub_height * sub_width) throw ShapeError("sub-image size mismatch");
  const std::size_t width = sub_width * k;
  std::vector<T> image(sub_height * sub_width * k * k);
  for (std::size_t y = 0; y < sub_height * k; ++y)
    for (std::size_t x = 0; x < width; ++x)
      image[y * width + x] = subs[(y % k) * k + (x % k)][(y / k) * sub_width + (x / k)];
  return image;
}

/// Gridding-artefact metric: for each band, the population variance of the
/// k*k phase sub-image means, averaged over bands.
inline double ips_metric(const Hypercube& cube, std::size_t k) {
  if (cube.bands() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    const auto subs = inverse_pixel_shuffle<float>(cube.band(b), cube.height(), cube.width(), k);
    std::vector<double> means;
    means.reserve(subs.size());
    for (const auto& s : subs) {
      double sum = 0.0;
      for (float v : s) sum += v;
      means.push_back(sum / static_cast<double>(s.size()));
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    total += var / static_cast<double>(means.size());
  }
  return total / static_cast<double>(cube.bands());
}

}  // namespace hsd
