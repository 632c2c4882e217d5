#pragma once

#include "binpose/geometry.hpp"
#include "binpose/point_cloud.hpp"

namespace binpose {

/// Componentwise min/max of the points. Throws on an empty cloud.
AxisAlignedBox bounding_box(const PointCloud& cloud);

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

/// Exact minimum enclosing sphere (Welzl with move-to-front, fixed shuffle).
/// Throws on an empty cloud.
Sphere min_bounding_sphere(const PointCloud& cloud);

inline double min_bounding_sphere_diameter(const PointCloud& cloud) {
  return 2.0 * min_bounding_sphere(cloud).radius;
}

}  // namespace binpose
