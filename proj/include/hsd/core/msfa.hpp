#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hsd/errors.hpp"

namespace hsd {

/// Periodic band layout of a snapshot mosaic sensor.
///
/// The k x k tile `band_map` is repeated over the sensor, so pixel (y, x)
/// records band `band_map[(y % k) * k + (x % k)]`. Every band index in
/// [0, band_count) must occur at least once in the tile; when band_count == k*k
/// each occurs exactly once.
class MsfaPattern {
 public:
  MsfaPattern(std::size_t period, std::vector<std::uint16_t> band_map)
      : period_(period), band_map_(std::move(band_map)) {
    if (period_ == 0) throw ConfigError("MSFA period must be positive");
    if (band_map_.size() != period_ * period_) {
      throw ConfigError("MSFA band map has " + std::to_string(band_map_.size()) +
                        " entries, expected " + std::to_string(period_ * period_));
    }
    std::size_t max_band = 0;
    for (auto b : band_map_) max_band = std::max<std::size_t>(max_band, b);
    band_count_ = max_band + 1;
    std::vector<int> seen(band_count_, 0);
    for (auto b : band_map_) ++seen[b];
    for (std::size_t b = 0; b < band_count_; ++b) {
      if (seen[b] == 0) {
        throw ConfigError("MSFA band map never samples band " + std::to_string(b));
      }
    }
  }

  /// Row-major 0..k*k-1 layout.
  static MsfaPattern row_major(std::size_t period) {
    std::vector<std::uint16_t> map(period * period);
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<std::uint16_t>(i);
    return MsfaPattern(period, std::move(map));
  }

  std::size_t period() const noexcept { return period_; }
  std::size_t band_count() const noexcept { return band_count_; }
  const std::vector<std::uint16_t>& band_map() const noexcept { return band_map_; }

  std::size_t band(std::size_t y, std::size_t x) const noexcept {
    return band_map_[(y % period_) * period_ + (x % period_)];
  }

  /// Tile phases (row, col) at which `b` is sampled.
  std::vector<std::pair<std::size_t, std::size_t>> phases_of(std::size_t b) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < period_; ++i)
      for (std::size_t j = 0; j < period_; ++j)
        if (band_map_[i * period_ + j] == b) out.emplace_back(i, j);
    return out;
  }

  bool operator==(const MsfaPattern&) const = default;

 private:
  std::size_t period_;
  std::vector<std::uint16_t> band_map_;
  std::size_t band_count_ = 0;
};

}  // namespace hsd
