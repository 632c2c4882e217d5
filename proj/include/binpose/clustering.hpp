#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "binpose/point_cloud.hpp"

namespace binpose {

inline constexpr std::int32_t kNoise = -1;

struct ClusterLabeling {
  std::vector<std::int32_t> labels;  // cluster id per point, kNoise for none
  std::int32_t cluster_count = 0;
};

/// Clustering hyperparameters. eps, bandwidth and convergence_tol are
/// fractions of `diameter`, so one set of values works across object scales;
/// with the default diameter of 1 they act as absolute lengths.
/// min_pts = 0 picks max(3, ceil(0.05 * N)) for N input points.
struct ClusterParams {
  double eps = 0.05;
  int min_pts = 0;
  double bandwidth = 0.3;
  int max_iters = 100;
  double convergence_tol = 1e-3;
  double diameter = 1.0;

  double eps_abs() const { return eps * diameter; }
  double bandwidth_abs() const { return bandwidth * diameter; }
  double convergence_tol_abs() const { return convergence_tol * diameter; }
  int resolve_min_pts(std::size_t n) const;
};

/// Density-based clustering. Core points have at least min_pts neighbors
/// within eps (inclusive, the point itself counts); clusters are
/// density-connected components discovered in point-index order; border
/// points join the first core cluster that reaches them. Others get kNoise.
ClusterLabeling dbscan(const PointCloud& points, double eps, int min_pts);

/// Mean distance of cluster points to their centroid. Lower means denser.
/// Throws std::invalid_argument on an empty cluster.
double density(const PointCloud& cluster);

/// Runs dbscan (eps and min_pts resolved from params), drops noise, and
/// returns the cluster with the smallest density value; ties prefer the
/// larger cluster, then the lower cluster id. Returns nullopt when every
/// point is noise (no keypoint cluster); callers treat that as rejection.
std::optional<PointCloud> filter_keypoints(const PointCloud& predictions,
                                           const ClusterParams& params);

struct MeanShiftResult {
  PointCloud modes;
  std::vector<std::int32_t> assignment;  // per input point, index into modes
};

/// Flat-kernel mean shift seeded at every input point: each seed repeatedly
/// moves to the mean of points within `bandwidth` until the shift drops
/// below `convergence_tol` or `max_iters` is hit. Converged positions
/// closer than bandwidth/2 are merged, keeping the position reached by more
/// seeds (ties by lower seed index).
MeanShiftResult mean_shift(const PointCloud& points, double bandwidth,
                           int max_iters = 100, double convergence_tol = 1e-3);

}  // namespace binpose
