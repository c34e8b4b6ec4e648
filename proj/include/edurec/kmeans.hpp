#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace edurec {

// Points are rows.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ClusterModel {
  int k = 0;
  PointMatrix centroids;
  std::vector<int> assignments;  // per point, in [0, k)
  double inertia = 0;            // sum of squared distances to assigned centroid
  int iterations = 0;
  bool converged = false;
  std::vector<double> inertia_history;  // after each assignment step
};

inline constexpr int kKMeansMaxIterations = 300;

// k-means++ seeding then Lloyd iterations until the assignment stops changing
// (or max_iterations). A cluster that loses all points keeps its centroid.
// Ties in assignment go to the lowest centroid index.
ClusterModel kmeans(const PointMatrix& points, int k, std::uint64_t seed,
                    int max_iterations = kKMeansMaxIterations);

// Index of the nearest centroid, lowest index on ties.
int nearest_centroid(const PointMatrix& centroids, const Eigen::Ref<const Eigen::RowVectorXd>& point);

// Per-column z-score (population sd); constant columns become zero.
PointMatrix standardize_columns(const PointMatrix& points);

}  // namespace edurec
