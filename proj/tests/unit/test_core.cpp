#include <gtest/gtest.h>

#include <random>

#include "hsd/core/msfa.hpp"
#include "hsd/core/sampling.hpp"
#include "hsd/core/types.hpp"

using namespace hsd;

namespace {

Hypercube random_cube(std::size_t b, std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Hypercube c(b, h, w);
  for (auto& v : c.values()) v = u(rng);
  return c;
}

}  // namespace

TEST(Msfa, RowMajorLayout) {
  const auto p = MsfaPattern::row_major(4);
  EXPECT_EQ(p.band_count(), 16u);
  EXPECT_EQ(p.band(0, 0), 0);
  EXPECT_EQ(p.band(0, 3), 3);
  EXPECT_EQ(p.band(1, 0), 4);
  EXPECT_EQ(p.band(5, 6), p.band(1, 2));
  EXPECT_EQ(p.phases_of(6).size(), 1u);
}

TEST(Msfa, RejectsBadMaps) {
  EXPECT_THROW(MsfaPattern(0, {}), ConfigError);
  EXPECT_THROW(MsfaPattern(2, {0, 1, 2}), ConfigError);
  EXPECT_THROW(MsfaPattern(2, {0, 2, 2, 0}), ConfigError);  // band 1 never sampled
}

TEST(Msfa, RepeatedBandsHaveSeveralPhases) {
  MsfaPattern p(2, {0, 1, 1, 0});
  EXPECT_EQ(p.band_count(), 2u);
  EXPECT_EQ(p.phases_of(0).size(), 2u);
}

TEST(Hypercube, ValidatesPayload) {
  EXPECT_THROW(Hypercube(2, 2, 2, std::vector<float>(7), {1.0, 2.0}), ShapeError);
  EXPECT_THROW(Hypercube(2, 1, 1, std::vector<float>(2), {2.0, 1.0}), ConfigError);
}

TEST(SnapshotMosaic, RejectsOutOfRangeAndIndivisible) {
  const auto p = MsfaPattern::row_major(4);
  EXPECT_THROW(SnapshotMosaic(6, 8, std::vector<float>(48, 0.5f), p), ShapeError);
  std::vector<float> v(64, 0.5f);
  v[3] = 1.5f;
  EXPECT_THROW(SnapshotMosaic(8, 8, v, p), ConfigError);
}

TEST(Sampling, SimulateReadsTheMappedBand) {
  const auto cube = random_cube(16, 8, 8, 1);
  const auto p = MsfaPattern::row_major(4);
  const auto m = simulate_mosaic(cube, p);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(m.at(y, x), cube.at(p.band(y, x), y, x));
}

TEST(Sampling, BandMismatchIsShapeError) {
  EXPECT_THROW(simulate_mosaic(random_cube(9, 8, 8, 0), MsfaPattern::row_major(4)), ShapeError);
}

TEST(Sampling, OverrideIsExactAndIdempotent) {
  const auto p = MsfaPattern::row_major(4);
  const auto m = simulate_mosaic(random_cube(16, 8, 8, 2), p);
  const auto other = random_cube(16, 8, 8, 3);
  const auto once = override_samples(other, m);
  const auto twice = override_samples(once, m);
  EXPECT_EQ(once, twice);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) {
      EXPECT_EQ(once.at(p.band(y, x), y, x), m.at(y, x));
      for (std::size_t b = 0; b < 16; ++b)
        if (b != p.band(y, x)) EXPECT_EQ(once.at(b, y, x), other.at(b, y, x));
    }
}

TEST(Sampling, LinearDemosaicKeepsSamples) {
  const auto p = MsfaPattern::row_major(4);
  const auto m = simulate_mosaic(random_cube(16, 12, 16, 4), p);
  const auto lin = linear_demosaic(m);
  for (std::size_t y = 0; y < 12; ++y)
    for (std::size_t x = 0; x < 16; ++x) EXPECT_EQ(lin.at(p.band(y, x), y, x), m.at(y, x));
}

TEST(Sampling, LinearDemosaicOfConstantBandsIsConstant) {
  const auto p = MsfaPattern::row_major(4);
  Hypercube cube(16, 16, 16);
  for (std::size_t b = 0; b < 16; ++b)
    for (auto& v : cube.band(b)) v = 0.05f * static_cast<float>(b);
  const auto lin = linear_demosaic(simulate_mosaic(cube, p));
  for (std::size_t b = 0; b < 16; ++b)
    for (float v : lin.band(b)) EXPECT_NEAR(v, 0.05f * b, 1e-6);
}

TEST(Sampling, LinearDemosaicReproducesRampsInsideTheHull) {
  // Bilinear interpolation is exact for planar data between samples.
  const auto p = MsfaPattern::row_major(2);
  Hypercube cube(4, 16, 16);
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t y = 0; y < 16; ++y)
      for (std::size_t x = 0; x < 16; ++x) cube.at(b, y, x) = 0.01f * y + 0.02f * x + 0.03f * b;
  const auto lin = linear_demosaic(simulate_mosaic(cube, p));
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t y = 2; y < 14; ++y)
      for (std::size_t x = 2; x < 14; ++x) EXPECT_NEAR(lin.at(b, y, x), cube.at(b, y, x), 1e-5);
}

TEST(Shuffle, RoundTripAndLayout) {
  std::vector<int> img(8 * 12);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<int>(i);
  const auto subs = inverse_pixel_shuffle<int>(img, 8, 12, 4);
  ASSERT_EQ(subs.size(), 16u);
  EXPECT_EQ(subs[1 * 4 + 2][0], img[1 * 12 + 2]);
  EXPECT_EQ(subs[0][1], img[4]);
  EXPECT_EQ(pixel_shuffle(subs, 2, 3, 4), img);
  EXPECT_THROW(inverse_pixel_shuffle<int>(img, 8, 12, 5), ShapeError);
}

TEST(IpsMetric, CraftedCase) {
  // One 8x8 band, ones at (0, 0) mod 4: sub-image means are one 1 and
  // fifteen 0; population variance by direct summation.
  Hypercube cube(1, 8, 8, std::vector<float>(64, 0.0f), {500.0});
  for (std::size_t y = 0; y < 8; y += 4)
    for (std::size_t x = 0; x < 8; x += 4) cube.at(0, y, x) = 1.0f;
  double means[16] = {1.0};
  double mu = 0.0, var = 0.0;
  for (double m : means) mu += m / 16.0;
  for (double m : means) var += (m - mu) * (m - mu) / 16.0;
  EXPECT_DOUBLE_EQ(var, 15.0 / 256.0);
  EXPECT_NEAR(ips_metric(cube, 4), var, 1e-15);
}

TEST(IpsMetric, ConstantAndOffsetInvariant) {
  EXPECT_EQ(ips_metric(Hypercube(3, 8, 8, 0.4f), 4), 0.0);
  auto cube = random_cube(2, 8, 8, 5);
  const double base = ips_metric(cube, 4);
  for (auto& v : cube.band(1)) v += 0.25f;
  EXPECT_NEAR(ips_metric(cube, 4), base, 1e-7);
}
