#include "binpose/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "binpose/kernels.hpp"
#include "binpose/neighbor_index.hpp"

namespace binpose {

int ClusterParams::resolve_min_pts(std::size_t n) const {
  if (min_pts > 0) return min_pts;
  return std::max<int>(3, static_cast<int>(std::ceil(0.05 * static_cast<double>(n))));
}

ClusterLabeling dbscan(const PointCloud& points, double eps, int min_pts) {
  if (eps <= 0.0) throw std::invalid_argument("dbscan eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("dbscan min_pts must be at least 1");
  const std::size_t n = points.size();
  ClusterLabeling out;
  out.labels.assign(n, kNoise);
  if (n == 0) return out;

  constexpr std::int32_t kUnprocessed = -2;
  std::fill(out.labels.begin(), out.labels.end(), kUnprocessed);
  NeighborIndex index(points);

  std::deque<std::uint32_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] != kUnprocessed) continue;
    auto hits = index.radius(points.point(i), eps);
    if (hits.size() < static_cast<std::size_t>(min_pts)) {
      out.labels[i] = kNoise;
      continue;
    }
    const std::int32_t cid = out.cluster_count++;
    out.labels[i] = cid;
    queue.clear();
    for (std::uint32_t h : hits)
      if (h != i) queue.push_back(h);
    while (!queue.empty()) {
      const std::uint32_t j = queue.front();
      queue.pop_front();
      if (out.labels[j] == kNoise) out.labels[j] = cid;  // border point
      if (out.labels[j] != kUnprocessed) continue;
      out.labels[j] = cid;
      auto nj = index.radius(points.point(j), eps);
      if (nj.size() >= static_cast<std::size_t>(min_pts))
        for (std::uint32_t h : nj) queue.push_back(h);
    }
  }
  return out;
}

double density(const PointCloud& cluster) {
  if (cluster.empty()) throw std::invalid_argument("density of empty cluster");
  const Vec3 c = cluster.centroid();
  const double sum = kernels::ops().sum_dist_to_point(
      cluster.x.data(), cluster.y.data(), cluster.z.data(), cluster.size(), c.x, c.y,
      c.z);
  return sum / static_cast<double>(cluster.size());
}

std::optional<PointCloud> filter_keypoints(const PointCloud& predictions,
                                           const ClusterParams& params) {
  if (predictions.empty()) throw std::invalid_argument("no predictions to filter");
  const ClusterLabeling labeling =
      dbscan(predictions, params.eps_abs(), params.resolve_min_pts(predictions.size()));
  if (labeling.cluster_count == 0) return std::nullopt;

  std::vector<std::vector<std::uint32_t>> members(
      static_cast<std::size_t>(labeling.cluster_count));
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (labeling.labels[i] != kNoise)
      members[static_cast<std::size_t>(labeling.labels[i])].push_back(
          static_cast<std::uint32_t>(i));

  std::int32_t best = -1;
  double best_density = 0.0;
  PointCloud best_cloud;
  for (std::int32_t c = 0; c < labeling.cluster_count; ++c) {
    PointCloud cloud = predictions.select(members[static_cast<std::size_t>(c)]);
    const double d = density(cloud);
    const bool better =
        best < 0 || d < best_density ||
        (d == best_density && cloud.size() > best_cloud.size());
    if (better) {
      best = c;
      best_density = d;
      best_cloud = std::move(cloud);
    }
  }
  return best_cloud;
}

namespace {

struct SeedGroup {
  Vec3 position;           // converged position of the first seed in the group
  std::size_t count = 0;   // seeds that converged here
  std::size_t first_seed = 0;
};

}  // namespace

MeanShiftResult mean_shift(const PointCloud& points, double bandwidth, int max_iters,
                           double convergence_tol) {
  if (bandwidth <= 0.0) throw std::invalid_argument("mean shift bandwidth must be positive");
  MeanShiftResult result;
  const std::size_t n = points.size();
  if (n == 0) return result;

  NeighborIndex index(points);
  std::vector<Vec3> converged(n);
  for (std::size_t s = 0; s < n; ++s) {
    Vec3 x = points.point(s);
    for (int it = 0; it < max_iters; ++it) {
      std::size_t count = 0;
      Vec3 sum{};
      index.radius_sum(x, bandwidth, &count, &sum);
      if (count == 0) break;
      const Vec3 next = sum / static_cast<double>(count);
      const double shift = (next - x).norm();
      x = next;
      if (shift < convergence_tol) break;
    }
    converged[s] = x;
  }

  // Group numerically identical limits first, then merge nearby groups.
  std::vector<SeedGroup> groups;
  std::vector<std::size_t> seed_group(n);
  const double group_tol = std::max(convergence_tol, 1e-12);
  for (std::size_t s = 0; s < n; ++s) {
    bool matched = false;
    for (std::size_t g = 0; g < groups.size(); ++g)
      if ((groups[g].position - converged[s]).norm() <= group_tol) {
        ++groups[g].count;
        seed_group[s] = g;
        matched = true;
        break;
      }
    if (!matched) {
      groups.push_back({converged[s], 1, s});
      seed_group[s] = groups.size() - 1;
    }
  }

  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (groups[a].count != groups[b].count) return groups[a].count > groups[b].count;
    return groups[a].first_seed < groups[b].first_seed;
  });

  std::vector<std::int32_t> group_mode(groups.size(), -1);
  for (std::size_t g : order) {
    if (group_mode[g] >= 0) continue;
    const std::int32_t mode = static_cast<std::int32_t>(result.modes.size());
    result.modes.push_back(groups[g].position);
    for (std::size_t h : order)
      if (group_mode[h] < 0 &&
          (groups[h].position - groups[g].position).norm() < bandwidth / 2.0)
        group_mode[h] = mode;
  }

  result.assignment.resize(n);
  for (std::size_t s = 0; s < n; ++s)
    result.assignment[s] = group_mode[seed_group[s]];
  return result;
}

}  // namespace binpose
