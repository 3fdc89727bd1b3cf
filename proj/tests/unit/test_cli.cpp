#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsd/cli/commands.hpp"
#include "hsd/cli/manifest.hpp"
#include "hsd/io/containers.hpp"

using namespace hsd;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result hsd_run(std::vector<std::string> args) {
  args.insert(args.begin(), "hsd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hsd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SyntheticToLinearDemosaicKeepsSamples) {
  ASSERT_EQ(hsd_run({"gen-synthetic", "--count", "2", "--height", "16", "--width", "20", "--seed", "3", "--out",
                     path("gt")})
                .code,
            0);
  ASSERT_TRUE(fs::exists(path("gt/scene_0001.hsc1")));
  ASSERT_EQ(hsd_run({"simulate", "--input", path("gt/scene_0000.hsc1"), "--out", path("raw")}).code, 0);
  const auto r = hsd_run({"demosaic", "linear", "--input", path("raw/scene_0000.mos1"), "--out", path("lin")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto mosaic = io::load_mos1(path("raw/scene_0000.mos1"));
  const auto cube = io::load_hsc1(path("lin/scene_0000.hsc1"));
  for (std::size_t y = 0; y < mosaic.height(); ++y)
    for (std::size_t x = 0; x < mosaic.width(); ++x) EXPECT_EQ(cube.at(mosaic.band(y, x), y, x), mosaic.at(y, x));

  const auto rec = nlohmann::json::parse(slurp(path("lin/run.json")));
  EXPECT_EQ(rec["status"], "ok");
  EXPECT_EQ(rec["command"], "demosaic");
  EXPECT_EQ(rec["inputs"].size(), 1u);
}

TEST_F(CliTest, GenerationIsSeeded) {
  ASSERT_EQ(hsd_run({"gen-synthetic", "--height", "8", "--width", "8", "--seed", "5", "--out", path("a")}).code, 0);
  ASSERT_EQ(hsd_run({"gen-synthetic", "--height", "8", "--width", "8", "--seed", "5", "--out", path("b")}).code, 0);
  EXPECT_EQ(slurp(path("a/scene_0000.hsc1")), slurp(path("b/scene_0000.hsc1")));
}

TEST_F(CliTest, BradleyTerryFit) {
  std::ofstream(path("votes.csv")) << "method_a,method_b,wins_a,wins_b\nSGC,Ours,52,155\n";
  const auto r = hsd_run({"bt-fit", "--input", path("votes.csv"), "--out", path("bt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto bt = slurp(path("bt/bt.csv"));
  EXPECT_NE(bt.find("SGC,0.2512"), std::string::npos) << bt;
  EXPECT_TRUE(fs::exists(path("bt/pvalues.csv")));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(hsd_run({}).code, 2);
  EXPECT_EQ(hsd_run({"frobnicate"}).code, 2);
  EXPECT_EQ(hsd_run({"gen-synthetic", "--no-such-flag", "1"}).code, 2);
  EXPECT_EQ(hsd_run({"gen-synthetic", "--set", "lr.generator=1", "--out", path("x")}).code, 2);
  const auto missing = hsd_run({"simulate", "--input", path("absent.hsc1"), "--out", path("y")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("hsd: ", 0), 0u);
  const auto rec = nlohmann::json::parse(slurp(path("y/run.json")));
  EXPECT_EQ(rec["status"], "error");
  std::ofstream(path("bad.hsc1")) << "HSC1xx";
  const auto parse = hsd_run({"simulate", "--input", path("bad.hsc1"), "--out", path("z")});
  EXPECT_EQ(parse.code, 1);
  EXPECT_NE(parse.err.find("parse error"), std::string::npos);
}

TEST_F(CliTest, ConfigFileThenSetThenFlags) {
  std::ofstream(path("cfg.yaml")) << "height: 8\nwidth: 12\ncount: 3\n";
  ASSERT_EQ(hsd_run({"gen-synthetic", "--config", path("cfg.yaml"), "--set", "count=2", "--width", "16", "--out",
                     path("o")})
                .code,
            0);
  EXPECT_TRUE(fs::exists(path("o/scene_0001.hsc1")));
  EXPECT_FALSE(fs::exists(path("o/scene_0002.hsc1")));
  const auto c = io::load_hsc1(path("o/scene_0000.hsc1"));
  EXPECT_EQ(c.height(), 8u);
  EXPECT_EQ(c.width(), 16u);

  std::ofstream(path("typo.yaml")) << "heigth: 8\n";
  EXPECT_EQ(hsd_run({"gen-synthetic", "--config", path("typo.yaml"), "--out", path("p")}).code, 1);
}

TEST_F(CliTest, DataRootResolvesRelativeInputs) {
  ASSERT_EQ(hsd_run({"gen-synthetic", "--height", "8", "--width", "8", "--out", path("gt")}).code, 0);
  ::setenv("HSD_DATA_ROOT", dir_.c_str(), 1);
  const auto r = hsd_run({"simulate", "--input", "gt/scene_0000.hsc1", "--out", path("raw")});
  ::unsetenv("HSD_DATA_ROOT");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("raw/scene_0000.mos1")));
}

TEST(Manifest, SplitRules) {
  using cli::DatasetManifest;
  const auto ok = DatasetManifest::parse(
      "files:\n  - {path: a.mos1, case: p1, split: train}\n  - {path: b.mos1, case: p2, split: test}\n", "/d");
  EXPECT_NO_THROW(ok.validate(false));
  EXPECT_EQ(ok.split("test").size(), 1u);
  EXPECT_EQ(ok.split("test")[0].path, fs::path("/d/b.mos1"));

  const auto leak = DatasetManifest::parse(
      "files:\n  - {path: a.mos1, case: p1, split: train}\n  - {path: b.mos1, case: p1, split: test}\n", "/d");
  EXPECT_THROW(leak.validate(false), ConfigError);
  const auto dup = DatasetManifest::parse(
      "files:\n  - {path: a.mos1, case: p1, split: train}\n  - {path: a.mos1, case: p1, split: train}\n", "/d");
  EXPECT_THROW(dup.validate(false), ConfigError);
  const auto odd = DatasetManifest::parse("files:\n  - {path: a.mos1, case: p1, split: holdout}\n", "/d");
  EXPECT_THROW(odd.validate(false), ConfigError);
  EXPECT_THROW(DatasetManifest::parse("files: 3\n", "/d"), ConfigError);
  EXPECT_EQ(cli::parse_pattern_ref("row-major-4").period(), 4u);
  EXPECT_THROW(cli::parse_pattern_ref("bayer"), ConfigError);
}
