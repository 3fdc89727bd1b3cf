#pragma once

#include <cstdint>
#include <vector>

#include "hsd/core/msfa.hpp"
#include "hsd/nn/networks.hpp"

namespace hsd::eval {

struct LatencyStats {
  std::vector<double> frame_ms;
  double mean_ms = 0, min_ms = 0, max_ms = 0, p50_ms = 0, p90_ms = 0, p99_ms = 0;
};

/// Summary statistics of per-frame times; percentiles by linear interpolation.
LatencyStats summarize_latencies(std::vector<double> frame_ms);

struct BenchmarkOptions {
  std::int64_t height = 720;
  std::int64_t width = 1280;
  std::int64_t frames = 100;
  std::int64_t warmup = 2;
  std::int64_t threads = 1;  // intra-op threads on the benchmark thread
  std::uint64_t seed = 0;
};

/// Times demosaicker + RGB converter forwards on random bilinear cubes of
/// the requested size. Runs on its own thread; warm-up frames are excluded.
LatencyStats benchmark_inference(nn::DemosaicNet& demosaic, nn::RgbConverter& rgb, const MsfaPattern& pattern,
                                 const BenchmarkOptions& opts);

}  // namespace hsd::eval
