#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/errors.hpp"

namespace hsd {

/// `count` centre wavelengths evenly spaced over [first_nm, last_nm].
inline std::vector<double> linspace_band_centers(std::size_t count, double first_nm = 460.0,
                                                 double last_nm = 630.0) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? first_nm
                        : first_nm + (last_nm - first_nm) * static_cast<double>(i) /
                                         static_cast<double>(count - 1);
  }
  return out;
}

/// B x H x W spectral image stored band-major, row-major.
class Hypercube {
 public:
  Hypercube() = default;

  Hypercube(std::size_t bands, std::size_t height, std::size_t width, float fill = 0.0f)
      : Hypercube(bands, height, width, std::vector<float>(bands * height * width, fill),
                  linspace_band_centers(bands)) {}

  Hypercube(std::size_t bands, std::size_t height, std::size_t width, std::vector<float> values,
            std::vector<double> band_centers)
      : bands_(bands), height_(height), width_(width), values_(std::move(values)),
        band_centers_(std::move(band_centers)) {
    if (values_.size() != bands_ * height_ * width_) {
      throw ShapeError("hypercube payload has " + std::to_string(values_.size()) +
                       " values, expected " + std::to_string(bands_ * height_ * width_));
    }
    if (band_centers_.size() != bands_) {
      throw ShapeError("hypercube needs one centre wavelength per band");
    }
    for (std::size_t b = 1; b < bands_; ++b) {
      if (!(band_centers_[b] > band_centers_[b - 1])) {
        throw ConfigError("band centres must be strictly increasing");
      }
    }
  }

  std::size_t bands() const noexcept { return bands_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }

  float& at(std::size_t b, std::size_t y, std::size_t x) {
    return values_[(b * height_ + y) * width_ + x];
  }
  float at(std::size_t b, std::size_t y, std::size_t x) const {
    return values_[(b * height_ + y) * width_ + x];
  }

  std::span<float> band(std::size_t b) { return {values_.data() + b * plane_size(), plane_size()}; }
  std::span<const float> band(std::size_t b) const {
    return {values_.data() + b * plane_size(), plane_size()};
  }

  std::vector<float>& values() noexcept { return values_; }
  const std::vector<float>& values() const noexcept { return values_; }
  const std::vector<double>& band_centers() const noexcept { return band_centers_; }

  bool same_shape(const Hypercube& o) const noexcept {
    return bands_ == o.bands_ && height_ == o.height_ && width_ == o.width_;
  }

  bool all_finite() const {
    for (float v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Hypercube&) const = default;

 private:
  std::size_t bands_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> values_;
  std::vector<double> band_centers_;
};

/// Raw single-sensor frame: one band per pixel, values normalised to [0, 1].
class SnapshotMosaic {
 public:
  SnapshotMosaic(std::size_t height, std::size_t width, std::vector<float> values,
                 MsfaPattern pattern)
      : height_(height), width_(width), values_(std::move(values)), pattern_(std::move(pattern)) {
    const auto k = pattern_.period();
    if (height_ == 0 || width_ == 0 || height_ % k != 0 || width_ % k != 0) {
      throw ShapeError("mosaic size " + std::to_string(height_) + "x" + std::to_string(width_) +
                       " is not a positive multiple of the MSFA period " + std::to_string(k));
    }
    if (values_.size() != height_ * width_) {
      throw ShapeError("mosaic payload does not match its dimensions");
    }
    for (float v : values_) {
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
        throw ConfigError("mosaic values must be finite and within [0, 1]");
      }
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  const MsfaPattern& pattern() const noexcept { return pattern_; }
  const std::vector<float>& values() const noexcept { return values_; }

  float at(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
  std::size_t band(std::size_t y, std::size_t x) const noexcept { return pattern_.band(y, x); }

  bool operator==(const SnapshotMosaic&) const = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<float> values_;
  MsfaPattern pattern_;
};

/// 3 x H x W display image, channel-major, values in [0, 1].
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(std::size_t height, std::size_t width, float fill = 0.0f)
      : height_(height), width_(width), values_(3 * height * width, fill) {}
  RgbImage(std::size_t height, std::size_t width, std::vector<float> values)
      : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != 3 * height_ * width_) {
      throw ShapeError("RGB payload does not match its dimensions");
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  float& at(std::size_t c, std::size_t y, std::size_t x) {
    return values_[(c * height_ + y) * width_ + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return values_[(c * height_ + y) * width_ + x];
  }
  std::vector<float>& values() noexcept { return values_; }
  const std::vector<float>& values() const noexcept { return values_; }

  bool operator==(const RgbImage&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> values_;
};

}  // namespace hsd
