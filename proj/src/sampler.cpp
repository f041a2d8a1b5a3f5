#include "pstar/sampler.hpp"

#include <cmath>
#include <limits>

#include "pstar/error.hpp"

namespace pstar {

double l2_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureDims; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

SeedSelection max_min_sample(std::span<const FeatureVector> vectors, std::size_t k) {
  if (vectors.empty()) throw Error(ErrorKind::EmptyInput, "no vectors to sample from");
  if (k == 0) throw Error(ErrorKind::Usage, "seed count must be at least 1");
  const std::size_t n = vectors.size();
  const std::size_t target = std::min(k, n);

  FeatureVector centroid{};
  for (const auto& v : vectors) {
    for (std::size_t d = 0; d < kFeatureDims; ++d) centroid[d] += v[d];
  }
  for (auto& c : centroid) c /= static_cast<double>(n);

  SeedSelection sel;
  sel.indices.reserve(target);
  std::size_t first = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = l2_distance(vectors[i], centroid);
    if (d > best) {
      best = d;
      first = i;
    }
  }
  sel.indices.push_back(first);

  std::vector<bool> taken(n, false);
  taken[first] = true;
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = l2_distance(vectors[i], vectors[first]);

  while (sel.indices.size() < target) {
    std::size_t pick = n;
    double pick_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i] && nearest[i] > pick_dist) {
        pick_dist = nearest[i];
        pick = i;
      }
    }
    taken[pick] = true;
    sel.indices.push_back(pick);
    sel.min_pairwise_distance =
        sel.min_pairwise_distance ? std::min(*sel.min_pairwise_distance, pick_dist) : pick_dist;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) nearest[i] = std::min(nearest[i], l2_distance(vectors[i], vectors[pick]));
    }
  }
  return sel;
}

PcaProjection pca_project(std::span<const FeatureVector> vectors, int d) {
  if (vectors.size() < 2) throw Error(ErrorKind::TooFewSamples, "PCA needs at least 2 vectors");
  if (d < 1 || d > static_cast<int>(kFeatureDims)) throw Error(ErrorKind::Usage, "PCA target dims must be in [1, 5]");
  const auto n = static_cast<Eigen::Index>(vectors.size());
  constexpr auto p = static_cast<Eigen::Index>(kFeatureDims);

  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  PcaProjection out;
  out.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centred = x.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n);

  // Eigen returns eigenvalues in ascending order.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  out.components.resize(p, d);
  out.explained_variance.resize(d);
  for (int c = 0; c < d; ++c) {
    const Eigen::Index src = p - 1 - c;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < p; ++j) {
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    }
    if (v(arg) < 0.0) v = -v;
    out.components.col(c) = v;
    out.explained_variance(c) = std::max(0.0, solver.eigenvalues()(src));
  }
  out.coordinates = centred * out.components;
  return out;
}

}  // namespace pstar
