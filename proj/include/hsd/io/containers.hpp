#pragma once

// HSC1 hypercube and MOS1 snapshot containers.
//
//   HSC1: "HSC1" | u32 B | u32 H | u32 W | B*H*W f32      (band-major, row-major)
//   MOS1: "MOS1" | u32 H | u32 W | u16 k | k*k u16 bands | H*W u16 pixels
//
// All integers and floats little-endian.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"
#include "hsd/io/binary.hpp"

namespace hsd::io {

inline constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;
inline constexpr double kRaw16Max = 65535.0;

inline Bytes encode_hsc1(const Hypercube& cube) {
  ByteWriter w;
  w.raw("HSC1");
  w.u32(static_cast<std::uint32_t>(cube.bands()));
  w.u32(static_cast<std::uint32_t>(cube.height()));
  w.u32(static_cast<std::uint32_t>(cube.width()));
  for (float v : cube.values()) w.f32(v);
  return w.take();
}

/// HSC1 carries no wavelengths; `band_centers` defaults to the evenly spaced
/// visible-range layout.
inline Hypercube decode_hsc1(const Bytes& data, std::vector<double> band_centers = {}) {
  ByteReader r(data);
  const auto magic_at = r.offset();
  if (r.raw(4, "HSC1 magic") != "HSC1") throw ParseError("bad magic, expected HSC1", magic_at);
  const auto dims_at = r.offset();
  const std::uint64_t b = r.u32("HSC1 band count");
  const std::uint64_t h = r.u32("HSC1 height");
  const std::uint64_t w = r.u32("HSC1 width");
  if (b == 0 || h == 0 || w == 0) throw ParseError("HSC1 dimensions must be positive", dims_at);
  const std::uint64_t n = b * h * w;
  if (n > kMaxElements) throw ParseError("HSC1 dimensions overflow the element limit", dims_at);
  r.need(n * 4, "HSC1 payload");
  std::vector<float> values(n);
  for (auto& v : values) v = r.f32("HSC1 payload");
  if (r.remaining() != 0) throw ParseError("trailing bytes after HSC1 payload", r.offset());
  if (band_centers.empty()) band_centers = linspace_band_centers(b);
  if (band_centers.size() != b) throw ConfigError("band centre count does not match HSC1 band count");
  return Hypercube(b, h, w, std::move(values), std::move(band_centers));
}

inline std::uint16_t quantize16(float v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * kRaw16Max));
}

inline float dequantize16(std::uint16_t q) { return static_cast<float>(q / kRaw16Max); }

inline Bytes encode_mos1(const SnapshotMosaic& mosaic) {
  ByteWriter w;
  w.raw("MOS1");
  w.u32(static_cast<std::uint32_t>(mosaic.height()));
  w.u32(static_cast<std::uint32_t>(mosaic.width()));
  const auto& p = mosaic.pattern();
  w.u16(static_cast<std::uint16_t>(p.period()));
  for (auto b : p.band_map()) w.u16(b);
  for (float v : mosaic.values()) w.u16(quantize16(v));
  return w.take();
}

/// Pixel values are normalised by the 16-bit maximum on ingestion.
inline SnapshotMosaic decode_mos1(const Bytes& data) {
  ByteReader r(data);
  const auto magic_at = r.offset();
  if (r.raw(4, "MOS1 magic") != "MOS1") throw ParseError("bad magic, expected MOS1", magic_at);
  const auto dims_at = r.offset();
  const std::uint64_t h = r.u32("MOS1 height");
  const std::uint64_t w = r.u32("MOS1 width");
  const auto period_at = r.offset();
  const std::uint64_t k = r.u16("MOS1 period");
  if (k == 0) throw ParseError("MOS1 period must be positive", period_at);
  if (h == 0 || w == 0 || h % k != 0 || w % k != 0) {
    throw ParseError("MOS1 size is not a positive multiple of the period", dims_at);
  }
  if (h * w > kMaxElements) throw ParseError("MOS1 dimensions overflow the element limit", dims_at);
  const auto table_at = r.offset();
  std::vector<std::uint16_t> map(k * k);
  for (auto& b : map) b = r.u16("MOS1 band table");
  std::optional<MsfaPattern> pattern;
  try {
    pattern.emplace(k, map);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("MOS1 band table inconsistent with period: ") + e.what(), table_at);
  }
  r.need(h * w * 2, "MOS1 pixels");
  std::vector<float> values(h * w);
  for (auto& v : values) v = dequantize16(r.u16("MOS1 pixels"));
  if (r.remaining() != 0) throw ParseError("trailing bytes after MOS1 pixels", r.offset());
  return SnapshotMosaic(h, w, std::move(values), std::move(*pattern));
}

inline void save_hsc1(const std::filesystem::path& path, const Hypercube& cube) {
  write_file_atomic(path, encode_hsc1(cube));
}
inline Hypercube load_hsc1(const std::filesystem::path& path, std::vector<double> band_centers = {}) {
  return decode_hsc1(read_file(path), std::move(band_centers));
}
inline void save_mos1(const std::filesystem::path& path, const SnapshotMosaic& mosaic) {
  write_file_atomic(path, encode_mos1(mosaic));
}
inline SnapshotMosaic load_mos1(const std::filesystem::path& path) { return decode_mos1(read_file(path)); }

}  // namespace hsd::io
