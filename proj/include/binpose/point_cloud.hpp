#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "binpose/geometry.hpp"

namespace binpose {

/// Point set stored as separate x/y/z arrays so the arithmetic kernels can
/// stream it directly. Optional per-point channels: instance id and
/// visibility. Channels, when present, must match the point count.
class PointCloud {
 public:
  std::vector<double> x, y, z;
  std::optional<std::vector<std::int32_t>> instance_ids;
  std::optional<std::vector<double>> visibility;

  PointCloud() = default;
  explicit PointCloud(const std::vector<Vec3>& pts) {
    reserve(pts.size());
    for (const Vec3& p : pts) push_back(p);
  }

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }

  void reserve(std::size_t n) {
    x.reserve(n);
    y.reserve(n);
    z.reserve(n);
  }

  void push_back(const Vec3& p) {
    x.push_back(p.x);
    y.push_back(p.y);
    z.push_back(p.z);
  }

  Vec3 point(std::size_t i) const { return {x[i], y[i], z[i]}; }
  void set_point(std::size_t i, const Vec3& p) {
    x[i] = p.x;
    y[i] = p.y;
    z[i] = p.z;
  }

  Vec3 centroid() const;

  /// Subset in the given index order; channels follow.
  PointCloud select(const std::vector<std::uint32_t>& indices) const;

  /// Throws std::invalid_argument on channel length mismatch or
  /// non-finite coordinates.
  void validate() const;
};

/// Maps every point to R*x + t; attribute channels carry over.
PointCloud apply_pose(const RigidPose& pose, const PointCloud& cloud);

}  // namespace binpose
