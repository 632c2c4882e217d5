#pragma once

#include <cstdint>
#include <vector>

#include "binpose/object_model.hpp"

namespace binpose {

/// Canonical keypoints of an object. keypoints[0] is the model centroid
/// (the origin in the canonical frame); each later keypoint is the exit
/// point of a positive half-axis ray through the bounding box. Each
/// keypoint carries the set of positions it is indistinguishable from
/// under the object's proper symmetry group.
struct KeypointSet {
  std::vector<Vec3> keypoints;
  std::vector<std::vector<Vec3>> equivalents;
  std::size_t n_k() const { return keypoints.size(); }
};

/// Axis-selection rules by symmetry class: revolution uses the rotation
/// axis; finite uses the rotation axis plus one seeded in-plane axis;
/// mirror uses the two axes spanning the mirror plane (never its normal);
/// no_proper uses all three coordinate axes. Expects a canonical-frame spec.
std::vector<Vec3> select_axes(const SymmetrySpec& symmetry, std::uint64_t seed);

/// Orbit of k under the (discretized, for revolution) symmetry group,
/// deduplicated within 1e-6. k itself comes first.
std::vector<Vec3> equivalent_set(const Vec3& k, const SymmetrySpec& symmetry);

/// Centroid plus one box-boundary point per axis, with equivalent sets.
/// Throws std::invalid_argument("degenerate bounding box") when the box has
/// no extent along some axis.
KeypointSet select_keypoints(const ObjectModel& model, const std::vector<Vec3>& axes);

/// select_axes followed by select_keypoints.
KeypointSet make_keypoints(const ObjectModel& model, std::uint64_t seed);

}  // namespace binpose
