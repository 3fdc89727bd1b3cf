#pragma once

// Binary PGM (P5) and PPM (P6) at 8 or 16 bits per sample. 16-bit samples are
// big-endian as the netpbm format requires.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"
#include "hsd/io/binary.hpp"

namespace hsd::io {

struct RawImage {
  std::size_t channels = 1;  // 1 (PGM) or 3 (PPM)
  std::size_t height = 0;
  std::size_t width = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> samples;  // interleaved, row-major
};

inline Bytes encode_netpbm(const RawImage& img) {
  if (img.channels != 1 && img.channels != 3) throw ShapeError("netpbm images have 1 or 3 channels");
  if (img.maxval == 0 || img.maxval > 65535) throw ConfigError("netpbm maxval must be in [1, 65535]");
  const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                             std::to_string(img.maxval) + "\n";
  Bytes out(header.begin(), header.end());
  const bool wide = img.maxval > 255;
  for (auto s : img.samples) {
    if (wide) out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xff));
  }
  return out;
}

inline RawImage decode_netpbm(const Bytes& data) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(data[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) -> std::uint64_t {
    skip_space();
    const auto start = pos;
    std::uint64_t v = 0;
    while (pos < data.size() && std::isdigit(data[pos])) {
      v = v * 10 + (data[pos] - '0');
      if (v > (std::uint64_t{1} << 32)) throw ParseError(std::string("netpbm ") + what + " overflows", start);
      ++pos;
    }
    if (pos == start) throw ParseError(std::string("netpbm ") + what + " missing", start);
    return v;
  };
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6')) {
    throw ParseError("bad magic, expected P5 or P6", 0);
  }
  pos = 2;
  RawImage img;
  img.channels = data[1] == '5' ? 1 : 3;
  const auto dims_at = pos;
  img.width = read_uint("width");
  img.height = read_uint("height");
  img.maxval = static_cast<std::uint32_t>(read_uint("maxval"));
  if (img.width == 0 || img.height == 0) throw ParseError("netpbm dimensions must be positive", dims_at);
  if (img.maxval == 0 || img.maxval > 65535) throw ParseError("netpbm maxval out of range", dims_at);
  if (pos >= data.size() || !std::isspace(data[pos])) throw ParseError("netpbm header not terminated", pos);
  ++pos;
  const std::uint64_t n = static_cast<std::uint64_t>(img.width) * img.height * img.channels;
  const std::uint64_t bytes_per = img.maxval > 255 ? 2 : 1;
  if (data.size() - pos < n * bytes_per) {
    throw ParseError("truncated netpbm raster: need " + std::to_string(n * bytes_per) + " bytes", pos);
  }
  img.samples.resize(n);
  for (auto& s : img.samples) {
    s = bytes_per == 2 ? static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]) : data[pos];
    pos += bytes_per;
  }
  return img;
}

/// A single-channel 8/16-bit image as a mosaic, normalised by its maxval.
inline SnapshotMosaic mosaic_from_netpbm(const RawImage& img, const MsfaPattern& pattern) {
  if (img.channels != 1) throw ShapeError("a raw mosaic must be single-channel");
  std::vector<float> v(img.samples.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<float>(img.samples[i] / static_cast<double>(img.maxval));
  return SnapshotMosaic(img.height, img.width, std::move(v), pattern);
}

inline RawImage netpbm_from_mosaic(const SnapshotMosaic& m) {
  RawImage img{1, m.height(), m.width(), 65535, {}};
  img.samples.resize(m.values().size());
  for (std::size_t i = 0; i < img.samples.size(); ++i)
    img.samples[i] = static_cast<std::uint16_t>(std::lround(std::clamp(m.values()[i], 0.0f, 1.0f) * 65535.0));
  return img;
}

inline RawImage netpbm_from_rgb(const RgbImage& rgb, std::uint32_t maxval = 255) {
  RawImage img{3, rgb.height(), rgb.width(), maxval, {}};
  img.samples.resize(3 * rgb.height() * rgb.width());
  for (std::size_t y = 0; y < rgb.height(); ++y)
    for (std::size_t x = 0; x < rgb.width(); ++x)
      for (std::size_t c = 0; c < 3; ++c)
        img.samples[(y * rgb.width() + x) * 3 + c] =
            static_cast<std::uint16_t>(std::lround(std::clamp(rgb.at(c, y, x), 0.0f, 1.0f) * maxval));
  return img;
}

inline RgbImage rgb_from_netpbm(const RawImage& img) {
  if (img.channels != 3) throw ShapeError("expected a 3-channel PPM image");
  RgbImage rgb(img.height, img.width);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        rgb.at(c, y, x) = static_cast<float>(img.samples[(y * img.width + x) * 3 + c] /
                                             static_cast<double>(img.maxval));
  return rgb;
}

inline RawImage load_netpbm(const std::filesystem::path& p) { return decode_netpbm(read_file(p)); }
inline void save_netpbm(const std::filesystem::path& p, const RawImage& img) {
  write_file_atomic(p, encode_netpbm(img));
}

}  // namespace hsd::io
