#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "binpose/bounding.hpp"
#include "binpose/geometry.hpp"
#include "binpose/point_cloud.hpp"
#include "binpose/symmetry.hpp"

namespace binpose {

/// Object description in a canonical frame: centroid at the origin, the
/// symmetry axis (if any) along +z, a mirror plane (if any) spanned by x/z.
struct ObjectModel {
  std::string id;
  PointCloud model;
  SymmetrySpec symmetry;
  AxisAlignedBox box;
  double diameter = 0.0;  // minimum bounding sphere diameter
  /// Indices of a fixed farthest-point subsample of `model`, used wherever a
  /// cheap but well-spread stand-in for the full surface is needed.
  std::vector<std::size_t> eval_subsample;
};

/// Rotates `model` (and conjugates `spec` accordingly) into the canonical
/// frame and recenters the centroid at the origin. Validates the spec.
/// Throws std::invalid_argument on an inconsistent spec or empty cloud.
ObjectModel make_object_model(std::string id, PointCloud model, SymmetrySpec spec);

/// Farthest-point subsample: starts from a seeded point, then greedily adds
/// the point with the largest distance to the chosen set (ties: lowest
/// index). Returns min(count, cloud.size()) indices in pick order.
std::vector<std::size_t> farthest_point_indices(const PointCloud& cloud,
                                                std::size_t count,
                                                std::uint64_t seed);

inline constexpr std::size_t kEvalSubsampleSize = 256;

}  // namespace binpose
