#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hsd/errors.hpp"

namespace hsd {

/// Tabulated colour-matching functions (xbar, ybar, zbar) against wavelength.
class ColorMatchingTable {
 public:
  ColorMatchingTable(std::vector<double> wavelengths, std::vector<double> xbar,
                     std::vector<double> ybar, std::vector<double> zbar)
      : wavelengths_(std::move(wavelengths)), xbar_(std::move(xbar)), ybar_(std::move(ybar)),
        zbar_(std::move(zbar)) {
    const auto n = wavelengths_.size();
    if (n < 2 || xbar_.size() != n || ybar_.size() != n || zbar_.size() != n) {
      throw ConfigError("colour-matching table columns must have equal length >= 2");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && !(wavelengths_[i] > wavelengths_[i - 1])) {
        throw ConfigError("colour-matching wavelengths must be strictly increasing");
      }
      if (xbar_[i] < 0.0 || ybar_[i] < 0.0 || zbar_[i] < 0.0) {
        throw ConfigError("colour-matching weights must be non-negative");
      }
    }
  }

  double min_wavelength() const { return wavelengths_.front(); }
  double max_wavelength() const { return wavelengths_.back(); }
  const std::vector<double>& wavelengths() const { return wavelengths_; }

  /// Linearly interpolated (xbar, ybar, zbar) at `nm`.
  std::array<double, 3> sample(double nm) const {
    if (!(nm >= min_wavelength() && nm <= max_wavelength())) {
      throw ConfigError("wavelength " + std::to_string(nm) + " nm is outside the colour-matching range [" +
                        std::to_string(min_wavelength()) + ", " + std::to_string(max_wavelength()) + "]");
    }
    std::size_t hi = 1;
    while (hi + 1 < wavelengths_.size() && wavelengths_[hi] < nm) ++hi;
    const std::size_t lo = hi - 1;
    const double t = (nm - wavelengths_[lo]) / (wavelengths_[hi] - wavelengths_[lo]);
    auto lerp = [&](const std::vector<double>& v) { return v[lo] + t * (v[hi] - v[lo]); };
    return {lerp(xbar_), lerp(ybar_), lerp(zbar_)};
  }

 private:
  std::vector<double> wavelengths_, xbar_, ybar_, zbar_;
};

namespace detail {

inline double piecewise_gaussian(double x, double mu, double sigma_lo, double sigma_hi) {
  const double t = (x - mu) / (x < mu ? sigma_lo : sigma_hi);
  return std::exp(-0.5 * t * t);
}

}  // namespace detail

/// CIE 1931 2-degree observer at 5 nm over 380-780 nm, evaluated from the
/// multi-lobe Gaussian fit of Wyman, Sloan and Shirley (JCGT 2013). Within
/// about 1% of the published table; load the official table with
/// load_cmf_table() when exact values matter.
inline ColorMatchingTable cie1931_2deg() {
  std::vector<double> wl, x, y, z;
  for (int nm = 380; nm <= 780; nm += 5) {
    const double l = nm;
    using detail::piecewise_gaussian;
    const double xv = 1.056 * piecewise_gaussian(l, 599.8, 37.9, 31.0) +
                      0.362 * piecewise_gaussian(l, 442.0, 16.0, 26.7) -
                      0.065 * piecewise_gaussian(l, 501.1, 20.4, 26.2);
    const double yv = 0.821 * piecewise_gaussian(l, 568.8, 46.9, 40.5) +
                      0.286 * piecewise_gaussian(l, 530.9, 16.3, 31.1);
    const double zv = 1.217 * piecewise_gaussian(l, 437.0, 11.8, 36.0) +
                      0.681 * piecewise_gaussian(l, 459.0, 26.0, 13.8);
    wl.push_back(l);
    x.push_back(std::max(0.0, xv));
    y.push_back(std::max(0.0, yv));
    z.push_back(std::max(0.0, zv));
  }
  return ColorMatchingTable(std::move(wl), std::move(x), std::move(y), std::move(z));
}

/// Parses a plain-text table. Each non-empty line that does not start with '#'
/// holds either `wavelength xbar ybar zbar` or one (wavelength, value) pair
/// per channel: `wl xbar wl ybar wl zbar`.
inline ColorMatchingTable parse_cmf_table(std::istream& in) {
  std::vector<double> wl, x, y, z;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream row(line);
    std::vector<double> v;
    double d;
    while (row >> d) v.push_back(d);
    if (v.size() == 4) {
      wl.push_back(v[0]); x.push_back(v[1]); y.push_back(v[2]); z.push_back(v[3]);
    } else if (v.size() == 6) {
      if (v[0] != v[2] || v[0] != v[4]) {
        throw ConfigError("colour-matching line " + std::to_string(lineno) +
                          " has mismatched wavelengths across channels");
      }
      wl.push_back(v[0]); x.push_back(v[1]); y.push_back(v[3]); z.push_back(v[5]);
    } else {
      throw ConfigError("colour-matching line " + std::to_string(lineno) + " has " +
                        std::to_string(v.size()) + " numbers, expected 4 or 6");
    }
  }
  return ColorMatchingTable(std::move(wl), std::move(x), std::move(y), std::move(z));
}

inline ColorMatchingTable load_cmf_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open colour-matching table " + path);
  return parse_cmf_table(in);
}

}  // namespace hsd
