#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "hsd/core/types.hpp"
#include "hsd/errors.hpp"

namespace hsd::eval {

struct BoxplotStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double lo_whisker = 0.0;
  double hi_whisker = 0.0;
  std::vector<double> outliers;
};

/// Quantile by linear interpolation between order statistics at (n - 1) * p.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Tukey box plot summary: whiskers at the most extreme observations within
/// 1.5 IQR of the quartiles.
inline BoxplotStats boxplot(std::vector<double> values) {
  BoxplotStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.lo_whisker = s.q1;
  s.hi_whisker = s.q3;
  bool have_lo = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!have_lo) {
      s.lo_whisker = v;
      have_lo = true;
    }
    s.hi_whisker = v;
  }
  return s;
}

/// Per-band box plots of a - b.
inline std::vector<BoxplotStats> pixel_diff_stats(const Hypercube& a, const Hypercube& b) {
  if (!a.same_shape(b)) throw ShapeError("pixel_diff_stats needs cubes of identical shape");
  std::vector<BoxplotStats> out;
  out.reserve(a.bands());
  std::vector<double> diff(a.plane_size());
  for (std::size_t band = 0; band < a.bands(); ++band) {
    const auto pa = a.band(band);
    const auto pb = b.band(band);
    for (std::size_t i = 0; i < diff.size(); ++i)
      diff[i] = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    out.push_back(boxplot(diff));
  }
  return out;
}

/// CSV: band,median,q1,q3,lo_whisker,hi_whisker,n_outliers
inline void write_boxplot_csv(std::ostream& os, const std::vector<BoxplotStats>& stats) {
  os << "band,median,q1,q3,lo_whisker,hi_whisker,n_outliers\n";
  os.precision(9);
  for (std::size_t b = 0; b < stats.size(); ++b) {
    const auto& s = stats[b];
    os << b << ',' << s.median << ',' << s.q1 << ',' << s.q3 << ',' << s.lo_whisker << ','
       << s.hi_whisker << ',' << s.outliers.size() << '\n';
  }
}

}  // namespace hsd::eval
