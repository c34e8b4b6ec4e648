#include "edurec/kmeans.hpp"

#include <cmath>
#include <limits>

#include "edurec/error.hpp"
#include "edurec/random.hpp"

namespace edurec {

namespace {

double squared_distance(const PointMatrix& centroids, Eigen::Index c, const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  return (centroids.row(c) - p).squaredNorm();
}

PointMatrix seed_plus_plus(const PointMatrix& points, int k, Rng& rng) {
  const auto n = points.rows();
  PointMatrix centroids(k, points.cols());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = 1;

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - centroids.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    double total = 0;
    for (double v : d2) total += v;
    Eigen::Index pick = -1;
    if (total > 0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2[static_cast<std::size_t>(i)];
        if (target < 0 && d2[static_cast<std::size_t>(i)] > 0) {
          pick = i;
          break;
        }
      }
      if (pick < 0)  // rounding at the tail
        for (Eigen::Index i = n - 1; i >= 0; --i)
          if (d2[static_cast<std::size_t>(i)] > 0) {
            pick = i;
            break;
          }
    } else {
      // every remaining point coincides with a centroid; take an unused index
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      pick = unused[rng.below(unused.size())];
    }
    centroids.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = 1;
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

double assign(const PointMatrix& points, const PointMatrix& centroids, std::vector<int>& labels) {
  double inertia = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = nearest_centroid(centroids, points.row(i));
    labels[static_cast<std::size_t>(i)] = c;
    inertia += squared_distance(centroids, c, points.row(i));
  }
  return inertia;
}

}  // namespace

int nearest_centroid(const PointMatrix& centroids, const Eigen::Ref<const Eigen::RowVectorXd>& point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(centroids, c, point);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

ClusterModel kmeans(const PointMatrix& points, int k, std::uint64_t seed, int max_iterations) {
  if (k < 1) throw Error(ErrorCode::TooFewClusters, "k must be >= 1");
  if (points.rows() < k)
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(points.rows()) + " points for k=" + std::to_string(k));
  if (!points.allFinite()) throw Error(ErrorCode::NonFinitePoint, "points contain NaN or infinity");

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.centroids = seed_plus_plus(points, k, rng);
  model.assignments.assign(static_cast<std::size_t>(points.rows()), -1);

  std::vector<int> labels(model.assignments.size());
  for (int it = 0; it < max_iterations; ++it) {
    const double inertia = assign(points, model.centroids, labels);
    model.inertia_history.push_back(inertia);
    model.iterations = it + 1;
    if (labels == model.assignments) {
      model.converged = true;
      break;
    }
    model.assignments = labels;

    PointMatrix sums = PointMatrix::Zero(k, points.cols());
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++sizes[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] > 0)
        model.centroids.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
  }
  if (!model.converged) {
    // last step was a centroid update; restore the nearest-centroid invariant
    assign(points, model.centroids, model.assignments);
  }
  model.inertia = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    model.inertia += squared_distance(model.centroids, model.assignments[static_cast<std::size_t>(i)], points.row(i));
  return model;
}

PointMatrix standardize_columns(const PointMatrix& points) {
  PointMatrix out = points;
  const auto n = static_cast<double>(points.rows());
  if (points.rows() == 0) return out;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double mean = points.col(j).mean();
    const double var = (points.col(j).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd > 0) out.col(j) = (points.col(j).array() - mean) / sd;
    else out.col(j).setZero();
  }
  return out;
}

}  // namespace edurec
