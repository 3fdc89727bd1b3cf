#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"

namespace hsd::data {

enum class SceneFamily {
  kSmooth,     // low-frequency spectral gradients
  kPiecewise,  // Voronoi regions, one spectral signature each
  kEdgeChart,  // shared gratings and hard edges over blended material spectra
};

inline SceneFamily parse_scene_family(const std::string& s) {
  if (s == "smooth") return SceneFamily::kSmooth;
  if (s == "piecewise") return SceneFamily::kPiecewise;
  if (s == "edge-chart") return SceneFamily::kEdgeChart;
  throw ConfigError("unknown scene family '" + s + "' (smooth | piecewise | edge-chart)");
}

inline std::string scene_family_name(SceneFamily f) {
  switch (f) {
    case SceneFamily::kSmooth: return "smooth";
    case SceneFamily::kPiecewise: return "piecewise";
    case SceneFamily::kEdgeChart: return "edge-chart";
  }
  return "?";
}

struct SyntheticSceneConfig {
  std::uint64_t seed = 0;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t bands = 16;
  SceneFamily family = SceneFamily::kEdgeChart;
  double noise = 0.0;  // additive Gaussian sigma, result clamped to [0, 1]
  double first_nm = 460.0;
  double last_nm = 630.0;
};

struct SyntheticScene {
  Hypercube cube;
  /// Region id per pixel for the piecewise family, empty otherwise.
  std::vector<int> regions;
};

namespace detail {

// Smooth reflectance-like signature: two Gaussian lobes over wavelength plus
// a floor, clipped to [0, 1].
inline std::vector<double> random_spectrum(std::mt19937_64& rng, const std::vector<double>& wl) {
  std::uniform_real_distribution<double> centre(wl.front() - 20.0, wl.back() + 20.0);
  std::uniform_real_distribution<double> width(20.0, 80.0);
  std::uniform_real_distribution<double> amp(0.2, 0.9);
  std::uniform_real_distribution<double> floor(0.05, 0.2);
  const double c0 = centre(rng), c1 = centre(rng), w0 = width(rng), w1 = width(rng);
  const double a0 = amp(rng), a1 = amp(rng), f = floor(rng);
  std::vector<double> s(wl.size());
  for (std::size_t b = 0; b < wl.size(); ++b) {
    const double g0 = (wl[b] - c0) / w0, g1 = (wl[b] - c1) / w1;
    s[b] = std::clamp(a0 * std::exp(-0.5 * g0 * g0) + a1 * std::exp(-0.5 * g1 * g1) + f, 0.0, 1.0);
  }
  return s;
}

}  // namespace detail

/// Deterministic B-band scene with known ground truth.
inline SyntheticScene generate_synthetic_scene(const SyntheticSceneConfig& cfg) {
  if (cfg.height == 0 || cfg.width == 0) throw ConfigError("synthetic scene size must be positive");
  if (cfg.bands == 0) throw ConfigError("synthetic scene needs at least one band");
  if (!(cfg.noise >= 0.0)) throw ConfigError("noise level must be non-negative");
  if (!(cfg.last_nm > cfg.first_nm) && cfg.bands > 1) throw ConfigError("wavelength range is empty");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto wl = linspace_band_centers(cfg.bands, cfg.first_nm, cfg.last_nm);
  const auto h = cfg.height, w = cfg.width, nb = cfg.bands;
  SyntheticScene scene{Hypercube(nb, h, w, std::vector<float>(nb * h * w), wl), {}};
  auto& cube = scene.cube;

  switch (cfg.family) {
    case SceneFamily::kSmooth: {
      // Bilinear blend of four corner spectra under a mild radial shading.
      std::vector<std::vector<double>> corners;
      for (int i = 0; i < 4; ++i) corners.push_back(detail::random_spectrum(rng, wl));
      const double cx = unit(rng), cy = unit(rng), falloff = 0.2 + 0.3 * unit(rng);
      for (std::size_t y = 0; y < h; ++y) {
        const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
        for (std::size_t x = 0; x < w; ++x) {
          const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
          const double r2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
          const double shade = 1.0 - falloff * std::min(1.0, r2);
          for (std::size_t b = 0; b < nb; ++b) {
            const double s = (1 - u) * (1 - v) * corners[0][b] + u * (1 - v) * corners[1][b] +
                             (1 - u) * v * corners[2][b] + u * v * corners[3][b];
            cube.at(b, y, x) = static_cast<float>(std::clamp(s * shade, 0.0, 1.0));
          }
        }
      }
      break;
    }
    case SceneFamily::kPiecewise: {
      std::uniform_int_distribution<int> count(6, 14);
      const int n = count(rng);
      std::vector<double> sy(n), sx(n);
      std::vector<std::vector<double>> spectra;
      for (int r = 0; r < n; ++r) {
        sy[r] = unit(rng) * h;
        sx[r] = unit(rng) * w;
        spectra.push_back(detail::random_spectrum(rng, wl));
      }
      scene.regions.resize(h * w);
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          int best = 0;
          double best_d = 1e300;
          for (int r = 0; r < n; ++r) {
            const double d = (y - sy[r]) * (y - sy[r]) + (x - sx[r]) * (x - sx[r]);
            if (d < best_d) {
              best_d = d;
              best = r;
            }
          }
          scene.regions[y * w + x] = best;
          for (std::size_t b = 0; b < nb; ++b) cube.at(b, y, x) = static_cast<float>(spectra[best][b]);
        }
      }
      break;
    }
    case SceneFamily::kEdgeChart: {
      // Spatial texture shared by all bands: oriented gratings darkened by
      // half-plane edges. Material spectra blend smoothly underneath.
      constexpr double kTau = 2.0 * std::numbers::pi;
      struct Grating { double ux, uy, freq, phase, amp; };
      struct Edge { double ux, uy, offset, gain; };
      std::vector<Grating> gratings(4);
      double amp_sum = 0.0;
      for (auto& g : gratings) {
        const double th = unit(rng) * std::numbers::pi;
        g = {std::cos(th), std::sin(th), 2.0 + 12.0 * unit(rng), kTau * unit(rng), 0.3 + 0.7 * unit(rng)};
        amp_sum += g.amp;
      }
      std::vector<Edge> edges(3);
      for (auto& e : edges) {
        const double th = unit(rng) * std::numbers::pi;
        e = {std::cos(th), std::sin(th), 0.6 * unit(rng) - 0.3, 0.4 + 0.6 * unit(rng)};
      }
      struct Blob { double cx, cy; std::vector<double> spectrum; };
      std::vector<Blob> blobs(3);
      for (auto& bl : blobs) {
        bl.cx = unit(rng);
        bl.cy = unit(rng);
        bl.spectrum = detail::random_spectrum(rng, wl);
      }
      std::vector<double> mix(nb);
      for (std::size_t y = 0; y < h; ++y) {
        const double v = static_cast<double>(y) / static_cast<double>(h);
        for (std::size_t x = 0; x < w; ++x) {
          const double u = static_cast<double>(x) / static_cast<double>(w);
          double tex = 0.0;
          for (const auto& g : gratings)
            tex += g.amp * std::sin(kTau * g.freq * (g.ux * u + g.uy * v) + g.phase);
          tex = 0.5 + 0.5 * tex / amp_sum;
          for (const auto& e : edges)
            if (e.ux * (u - 0.5) + e.uy * (v - 0.5) > e.offset) tex *= e.gain;
          std::fill(mix.begin(), mix.end(), 0.0);
          double total = 0.0;
          for (const auto& bl : blobs) {
            const double wgt = std::exp(-((u - bl.cx) * (u - bl.cx) + (v - bl.cy) * (v - bl.cy)) / 0.1);
            total += wgt;
            for (std::size_t b = 0; b < nb; ++b) mix[b] += wgt * bl.spectrum[b];
          }
          for (std::size_t b = 0; b < nb; ++b)
            cube.at(b, y, x) = static_cast<float>(std::clamp(tex * mix[b] / (total + 1e-6), 0.0, 1.0));
        }
      }
      break;
    }
  }

  if (cfg.noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, cfg.noise);
    for (auto& v : cube.values()) v = static_cast<float>(std::clamp(v + gauss(rng), 0.0, 1.0));
  }
  return scene;
}

}  // namespace hsd::data
