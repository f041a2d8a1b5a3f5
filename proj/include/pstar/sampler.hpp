#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pstar/dfv.hpp"

namespace pstar {

struct SeedSelection {
  std::vector<std::size_t> indices;  // greedy selection order
  // Minimum pairwise L2 distance among the picks; absent for a single pick.
  std::optional<double> min_pairwise_distance;
};

// Greedy farthest-point sampling. The first pick is the point farthest from
// the centroid; each later pick maximizes its minimum distance to the picks so
// far. Ties go to the lowest index. Returns min(k, n) picks.
SeedSelection max_min_sample(std::span<const FeatureVector> vectors, std::size_t k);

double l2_distance(const FeatureVector& a, const FeatureVector& b);

struct PcaProjection {
  Eigen::MatrixXd coordinates;         // n x d
  Eigen::VectorXd explained_variance;  // d, descending
  Eigen::MatrixXd components;          // kFeatureDims x d, orthonormal columns
  Eigen::VectorXd mean;                // kFeatureDims
};

// Projects mean-centred data onto the top-d eigenvectors of the population
// covariance. Each component is signed so its largest-magnitude loading is
// positive (lowest index wins a magnitude tie).
PcaProjection pca_project(std::span<const FeatureVector> vectors, int d = 2);

}  // namespace pstar
