#include "binpose/point_cloud.hpp"

#include <cmath>
#include <stdexcept>

#include "binpose/kernels.hpp"

namespace binpose {

Vec3 PointCloud::centroid() const {
  if (empty()) throw std::invalid_argument("centroid of empty cloud");
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    sx += x[i];
    sy += y[i];
    sz += z[i];
  }
  double inv = 1.0 / static_cast<double>(size());
  return {sx * inv, sy * inv, sz * inv};
}

PointCloud PointCloud::select(const std::vector<std::uint32_t>& indices) const {
  PointCloud out;
  out.reserve(indices.size());
  for (std::uint32_t i : indices) out.push_back(point(i));
  if (instance_ids) {
    out.instance_ids.emplace();
    out.instance_ids->reserve(indices.size());
    for (std::uint32_t i : indices) out.instance_ids->push_back((*instance_ids)[i]);
  }
  if (visibility) {
    out.visibility.emplace();
    out.visibility->reserve(indices.size());
    for (std::uint32_t i : indices) out.visibility->push_back((*visibility)[i]);
  }
  return out;
}

PointCloud apply_pose(const RigidPose& pose, const PointCloud& cloud) {
  PointCloud out = cloud;
  const double* r = pose.rotation.m.data();
  const double t[3] = {pose.translation.x, pose.translation.y, pose.translation.z};
  kernels::ops().transform_points(cloud.x.data(), cloud.y.data(), cloud.z.data(),
                                  cloud.size(), r, t, out.x.data(), out.y.data(),
                                  out.z.data());
  return out;
}

void PointCloud::validate() const {
  if (y.size() != x.size() || z.size() != x.size())
    throw std::invalid_argument("point cloud coordinate arrays disagree in length");
  if (instance_ids && instance_ids->size() != size())
    throw std::invalid_argument("instance id channel length mismatch");
  if (visibility && visibility->size() != size())
    throw std::invalid_argument("visibility channel length mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]) || !std::isfinite(z[i]))
      throw std::invalid_argument("non-finite point coordinate");
  }
}

}  // namespace binpose
