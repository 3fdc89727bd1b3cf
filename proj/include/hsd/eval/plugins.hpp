#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"

namespace hsd::eval {

/// Deterministic image -> fixed-length feature vector.
struct FeatureExtractor {
  std::string name;
  std::size_t dim = 0;
  std::function<std::vector<double>(const RgbImage&)> extract;
};

/// Built-in extractor: per channel the mean, standard deviation, four
/// quadrant means and the mean absolute horizontal / vertical differences
/// (8 values per channel, 24 in total).
inline FeatureExtractor identity_pool_extractor() {
  FeatureExtractor fx;
  fx.name = "identity-pool";
  fx.dim = 24;
  fx.extract = [](const RgbImage& img) {
    const auto h = img.height();
    const auto w = img.width();
    std::vector<double> f;
    f.reserve(24);
    for (std::size_t c = 0; c < 3; ++c) {
      double sum = 0.0, sq = 0.0, dx = 0.0, dy = 0.0;
      double quad[4] = {0, 0, 0, 0};
      std::size_t quad_n[4] = {0, 0, 0, 0};
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double v = img.at(c, y, x);
          sum += v;
          sq += v * v;
          const std::size_t q = (y * 2 >= h ? 2 : 0) + (x * 2 >= w ? 1 : 0);
          quad[q] += v;
          ++quad_n[q];
          if (x + 1 < w) dx += std::abs(img.at(c, y, x + 1) - v);
          if (y + 1 < h) dy += std::abs(img.at(c, y + 1, x) - v);
        }
      }
      const double n = static_cast<double>(h * w);
      const double mean = n > 0 ? sum / n : 0.0;
      f.push_back(mean);
      f.push_back(std::sqrt(std::max(0.0, n > 0 ? sq / n - mean * mean : 0.0)));
      for (int q = 0; q < 4; ++q) f.push_back(quad_n[q] ? quad[q] / static_cast<double>(quad_n[q]) : 0.0);
      f.push_back(w > 1 ? dx / static_cast<double>(h * (w - 1)) : 0.0);
      f.push_back(h > 1 ? dy / static_cast<double>((h - 1) * w) : 0.0);
    }
    return f;
  };
  return fx;
}

using QualityScorer = std::function<double(const RgbImage&)>;

/// Named no-reference quality scorers. "null" is always registered and
/// returns 0; pretrained scorers are registered by the host application.
class QualityRegistry {
 public:
  QualityRegistry() {
    scorers_["null"] = [](const RgbImage&) { return 0.0; };
  }

  void add(const std::string& name, QualityScorer scorer) { scorers_[name] = std::move(scorer); }

  bool contains(const std::string& name) const { return scorers_.count(name) != 0; }

  double score(const RgbImage& rgb, const std::string& name) const {
    auto it = scorers_.find(name);
    if (it == scorers_.end()) throw ConfigError("no quality scorer registered as '" + name + "'");
    return it->second(rgb);
  }

 private:
  std::map<std::string, QualityScorer> scorers_;
};

/// Feature extractors by name; "identity-pool" is built in, "external" and
/// others are registered by the host application.
class FeatureRegistry {
 public:
  FeatureRegistry() { add(identity_pool_extractor()); }

  void add(FeatureExtractor fx) {
    const auto name = fx.name;
    extractors_[name] = std::move(fx);
  }

  const FeatureExtractor& get(const std::string& name) const {
    auto it = extractors_.find(name);
    if (it == extractors_.end()) throw ConfigError("no feature extractor registered as '" + name + "'");
    return it->second;
  }

 private:
  std::map<std::string, FeatureExtractor> extractors_;
};

inline std::vector<std::vector<double>> extract_all(const FeatureExtractor& fx,
                                                    const std::vector<RgbImage>& images) {
  std::vector<std::vector<double>> rows;
  rows.reserve(images.size());
  for (const auto& img : images) {
    auto f = fx.extract(img);
    if (f.size() != fx.dim) {
      throw ShapeError("extractor '" + fx.name + "' returned " + std::to_string(f.size()) +
                       " features, declared " + std::to_string(fx.dim));
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

}  // namespace hsd::eval
