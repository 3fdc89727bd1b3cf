#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "hsd/core/sampling.hpp"
#include "hsd/io/containers.hpp"
#include "hsd/io/netpbm.hpp"

using namespace hsd;
using namespace hsd::io;

namespace {

Hypercube random_cube(std::size_t b, std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Hypercube c(b, h, w);
  for (auto& v : c.values()) v = u(rng);
  return c;
}

SnapshotMosaic quantized_mosaic(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> q(0, 65535);
  std::vector<float> v(8 * 12);
  for (auto& x : v) x = dequantize16(static_cast<std::uint16_t>(q(rng)));
  return SnapshotMosaic(8, 12, v, MsfaPattern::row_major(4));
}

}  // namespace

TEST(Hsc1, RoundTripIsExact) {
  const auto c = random_cube(5, 3, 7, 11);
  const auto d = decode_hsc1(encode_hsc1(c));
  EXPECT_EQ(d.values(), c.values());
  EXPECT_EQ(d.bands(), 5u);
  EXPECT_EQ(d.band_centers().front(), 460.0);
  EXPECT_EQ(encode_hsc1(c).size(), 16u + 5 * 3 * 7 * 4);
}

TEST(Hsc1, ReportsTruncationOffset) {
  auto bytes = encode_hsc1(random_cube(2, 2, 2, 1));
  bytes.resize(20);
  try {
    decode_hsc1(bytes);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 16u);
  }
  bytes.resize(10);
  try {
    decode_hsc1(bytes);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
}

TEST(Hsc1, RejectsMagicAndTrailingBytes) {
  auto bytes = encode_hsc1(random_cube(1, 1, 1, 1));
  bytes.push_back(0);
  EXPECT_THROW(decode_hsc1(bytes), ParseError);
  bytes.pop_back();
  bytes[0] = 'X';
  try {
    decode_hsc1(bytes);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(Mos1, RoundTripIsExactOnTheSixteenBitGrid) {
  const auto m = quantized_mosaic(3);
  const auto d = decode_mos1(encode_mos1(m));
  EXPECT_EQ(d.values(), m.values());
  EXPECT_EQ(d.pattern().band_map(), m.pattern().band_map());
}

TEST(Mos1, NormalisesByTheSixteenBitMaximum) {
  SnapshotMosaic m(2, 2, {0.0f, 1.0f, 0.5f, 0.25f}, MsfaPattern::row_major(2));
  const auto bytes = encode_mos1(m);
  // header 4 + 4 + 4 + 2, table 4 * 2, pixels at 22.
  EXPECT_EQ(bytes[24], 0xff);
  EXPECT_EQ(bytes[25], 0xff);
  EXPECT_EQ(decode_mos1(bytes).values()[1], 1.0f);
  EXPECT_NEAR(decode_mos1(bytes).values()[2], 32768.0 / 65535.0, 1e-7);
}

TEST(Mos1, RejectsInconsistentBandTable) {
  auto bytes = encode_mos1(SnapshotMosaic(2, 2, std::vector<float>(4, 0.1f), MsfaPattern::row_major(2)));
  bytes[14 + 2 * 3] = 7;  // band 7 in a 4-band table
  try {
    decode_mos1(bytes);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 14u);
  }
  auto odd = encode_mos1(SnapshotMosaic(2, 2, std::vector<float>(4, 0.1f), MsfaPattern::row_major(2)));
  odd[4] = 3;  // height 3 is not a multiple of 2
  EXPECT_THROW(decode_mos1(odd), ParseError);
}

TEST(Netpbm, SixteenBitMosaicIsLossless) {
  const auto m = quantized_mosaic(9);
  const auto raw = decode_netpbm(encode_netpbm(netpbm_from_mosaic(m)));
  EXPECT_EQ(raw.maxval, 65535u);
  EXPECT_EQ(mosaic_from_netpbm(raw, m.pattern()).values(), m.values());
}

TEST(Netpbm, RgbRoundTripAndFiles) {
  RgbImage img(2, 3);
  for (std::size_t i = 0; i < img.values().size(); ++i) img.values()[i] = static_cast<float>(i) / 17.0f;
  const auto back = rgb_from_netpbm(decode_netpbm(encode_netpbm(netpbm_from_rgb(img, 255))));
  for (std::size_t i = 0; i < img.values().size(); ++i) EXPECT_NEAR(back.values()[i], img.values()[i], 0.5 / 255);
  const auto dir = std::filesystem::temp_directory_path() / "hsd_io_test";
  std::filesystem::create_directories(dir);
  save_netpbm(dir / "x.ppm", netpbm_from_rgb(img, 65535));
  EXPECT_EQ(load_netpbm(dir / "x.ppm").channels, 3u);
  std::filesystem::remove_all(dir);
}

TEST(Netpbm, RejectsGarbage) {
  const std::string s = "P9\n1 1\n255\n\x01";
  EXPECT_THROW(decode_netpbm(Bytes(s.begin(), s.end())), ParseError);
  const std::string t = "P5\n2 2\n255\n\x01";
  EXPECT_THROW(decode_netpbm(Bytes(t.begin(), t.end())), ParseError);
}
