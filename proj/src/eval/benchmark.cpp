#include "hsd/eval/benchmark.hpp"

#include <ATen/Parallel.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <numeric>
#include <thread>

#include "hsd/errors.hpp"
#include "hsd/eval/boxplot.hpp"
#include "hsd/nn/tensor_bridge.hpp"

namespace hsd::eval {

LatencyStats summarize_latencies(std::vector<double> frame_ms) {
  LatencyStats s;
  s.frame_ms = frame_ms;
  if (frame_ms.empty()) return s;
  std::sort(frame_ms.begin(), frame_ms.end());
  s.mean_ms = std::accumulate(frame_ms.begin(), frame_ms.end(), 0.0) / static_cast<double>(frame_ms.size());
  s.min_ms = frame_ms.front();
  s.max_ms = frame_ms.back();
  s.p50_ms = quantile_sorted(frame_ms, 0.50);
  s.p90_ms = quantile_sorted(frame_ms, 0.90);
  s.p99_ms = quantile_sorted(frame_ms, 0.99);
  // Summation order can put the mean a rounding step outside [min, max].
  s.mean_ms = std::clamp(s.mean_ms, s.min_ms, s.max_ms);
  return s;
}

LatencyStats benchmark_inference(nn::DemosaicNet& demosaic, nn::RgbConverter& rgb, const MsfaPattern& pattern,
                                 const BenchmarkOptions& opts) {
  if (opts.frames < 1 || opts.warmup < 0 || opts.threads < 1) throw ConfigError("invalid benchmark options");
  const auto k = static_cast<std::int64_t>(pattern.period());
  if (opts.height % k != 0 || opts.width % k != 0) throw ShapeError("frame size must be a multiple of the period");

  std::vector<double> times;
  std::exception_ptr failure;
  std::thread worker([&] {
    try {
      at::set_num_threads(static_cast<int>(opts.threads));
      torch::InferenceMode guard;
      auto gen = at::detail::createCPUGenerator(opts.seed);
      const auto bands = static_cast<std::int64_t>(pattern.band_count());
      auto mask = nn::sample_mask(pattern, opts.height, opts.width);
      auto lin = torch::rand({1, bands, opts.height, opts.width}, gen);
      auto mosaic = (lin * mask).sum(1, /*keepdim=*/true);
      for (std::int64_t i = 0; i < opts.warmup + opts.frames; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        auto out = rgb->forward(demosaic->forward(lin, mosaic, mask));
        (void)out.sum().item<float>();
        const auto t1 = std::chrono::steady_clock::now();
        if (i >= opts.warmup) times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
    } catch (...) {
      failure = std::current_exception();
    }
  });
  worker.join();
  if (failure) std::rethrow_exception(failure);
  return summarize_latencies(std::move(times));
}

}  // namespace hsd::eval
