#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsd/errors.hpp"

namespace hsd::eval {

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues
/// from round-off are clamped to zero.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // unbiased (N - 1) sample covariance
};

/// Rows of `samples` are feature vectors.
inline Gaussian fit_gaussian(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) throw ShapeError("Frechet distance needs at least two vectors per set");
  Gaussian g;
  g.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - g.mean.transpose();
  g.cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  return g;
}

/// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}).
///
/// The trace of (S_a S_b)^{1/2} is taken as the trace of
/// (S_a^{1/2} S_b S_a^{1/2})^{1/2}, which shares its spectrum and is symmetric.
inline double frechet_distance(const Gaussian& a, const Gaussian& b) {
  if (a.mean.size() != b.mean.size()) {
    throw ShapeError("feature dimensions differ: " + std::to_string(a.mean.size()) + " vs " +
                     std::to_string(b.mean.size()));
  }
  const Eigen::MatrixXd root_a = psd_sqrt(a.cov);
  const Eigen::MatrixXd inner = root_a * b.cov * root_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (inner + inner.transpose()),
                                                     Eigen::EigenvaluesOnly);
  const double tr_cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * tr_cross;
  return std::max(0.0, d);
}

inline double frechet_distance(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b) {
  if (features_a.cols() != features_b.cols()) {
    throw ShapeError("feature dimensions differ: " + std::to_string(features_a.cols()) + " vs " +
                     std::to_string(features_b.cols()));
  }
  return frechet_distance(fit_gaussian(features_a), fit_gaussian(features_b));
}

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw ShapeError("ragged feature set");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

inline double frechet_distance(const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b) {
  return frechet_distance(to_matrix(a), to_matrix(b));
}

}  // namespace hsd::eval
