#include "binpose/keypoints.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "binpose/rng.hpp"

namespace binpose {

std::vector<Vec3> select_axes(const SymmetrySpec& symmetry, std::uint64_t seed) {
  const Vec3 ex{1.0, 0.0, 0.0}, ey{0.0, 1.0, 0.0}, ez{0.0, 0.0, 1.0};
  switch (symmetry.symmetry_class) {
    case SymmetryClass::revolution:
      return {ez};
    case SymmetryClass::finite: {
      Rng rng = make_rng(derive_seed(seed, "second-axis", 0));
      return {ez, (rng() & 1u) ? ex : ey};
    }
    case SymmetryClass::mirror: {
      if (!symmetry.mirror_plane_axes)
        throw std::invalid_argument("symmetry spec incomplete");
      return {(*symmetry.mirror_plane_axes)[0], (*symmetry.mirror_plane_axes)[1]};
    }
    case SymmetryClass::no_proper:
      return {ex, ey, ez};
  }
  throw std::invalid_argument("unknown symmetry class");
}

std::vector<Vec3> equivalent_set(const Vec3& k, const SymmetrySpec& symmetry) {
  std::vector<Vec3> out;
  for (const Rot3& g : symmetry.effective_group()) {
    const Vec3 img = g.apply(k);
    bool seen = false;
    for (const Vec3& v : out)
      if ((v - img).norm() <= 1e-6) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(img);
  }
  return out;
}

namespace {

/// Parameter at which the ray t*dir (t > 0) from the origin leaves the box.
double ray_box_exit(const AxisAlignedBox& box, const Vec3& dir) {
  double t = std::numeric_limits<double>::infinity();
  const double d[3] = {dir.x, dir.y, dir.z};
  const double mn[3] = {box.min_corner.x, box.min_corner.y, box.min_corner.z};
  const double mx[3] = {box.max_corner.x, box.max_corner.y, box.max_corner.z};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) <= 1e-12) continue;
    t = std::min(t, (d[i] > 0.0 ? mx[i] : mn[i]) / d[i]);
  }
  return t;
}

}  // namespace

KeypointSet select_keypoints(const ObjectModel& model, const std::vector<Vec3>& axes) {
  KeypointSet set;
  set.keypoints.push_back({0.0, 0.0, 0.0});
  for (const Vec3& axis : axes) {
    const double t = ray_box_exit(model.box, axis);
    if (!(t > 1e-12) || !std::isfinite(t))
      throw std::invalid_argument("degenerate bounding box");
    set.keypoints.push_back(axis * t);
  }
  set.equivalents.reserve(set.keypoints.size());
  for (const Vec3& k : set.keypoints)
    set.equivalents.push_back(equivalent_set(k, model.symmetry));
  return set;
}

KeypointSet make_keypoints(const ObjectModel& model, std::uint64_t seed) {
  return select_keypoints(model, select_axes(model.symmetry, seed));
}

}  // namespace binpose
