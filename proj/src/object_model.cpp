#include "binpose/object_model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "binpose/kernels.hpp"
#include "binpose/rng.hpp"

namespace binpose {

namespace {

Rot3 canonical_rotation(const SymmetrySpec& spec) {
  if (spec.symmetry_class == SymmetryClass::mirror) {
    const auto& [a1, a2] = *spec.mirror_plane_axes;
    // Rows map a1 to +x and a2 to +z; the middle row completes a
    // right-handed basis, so the plane normal lands on +y.
    const Vec3 r2 = a2.cross(a1);
    return Rot3{{a1.x, a1.y, a1.z, r2.x, r2.y, r2.z, a2.x, a2.y, a2.z}};
  }
  if (spec.rotation_axis) return Rot3::between(*spec.rotation_axis, {0.0, 0.0, 1.0});
  return Rot3::identity();
}

PointCloud transformed(const PointCloud& in, const Rot3& r, const Vec3& t) {
  PointCloud out = in;
  const double rot[9] = {r.m[0], r.m[1], r.m[2], r.m[3], r.m[4],
                         r.m[5], r.m[6], r.m[7], r.m[8]};
  const double tr[3] = {t.x, t.y, t.z};
  kernels::ops().transform_points(in.x.data(), in.y.data(), in.z.data(), in.size(),
                                  rot, tr, out.x.data(), out.y.data(), out.z.data());
  return out;
}

}  // namespace

std::vector<std::size_t> farthest_point_indices(const PointCloud& cloud,
                                                std::size_t count,
                                                std::uint64_t seed) {
  const std::size_t n = cloud.size();
  if (n == 0 || count == 0) return {};
  count = std::min(count, n);
  std::vector<std::size_t> picked;
  picked.reserve(count);
  Rng rng = make_rng(seed);
  picked.push_back(std::uniform_int_distribution<std::size_t>{0, n - 1}(rng));

  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  while (picked.size() < count) {
    const Vec3 last = cloud.point(picked.back());
    kernels::ops().update_min_dist_sq(cloud.x.data(), cloud.y.data(), cloud.z.data(),
                                      n, last.x, last.y, last.z, min_d2.data());
    std::size_t best = 0;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    if (best_d2 <= 0.0) break;  // every remaining point duplicates a chosen one
    picked.push_back(best);
  }
  return picked;
}

ObjectModel make_object_model(std::string id, PointCloud model, SymmetrySpec spec) {
  model.validate();
  if (model.empty()) throw std::invalid_argument("object model cloud is empty");
  const bool needs_axis = spec.symmetry_class == SymmetryClass::revolution ||
                          spec.symmetry_class == SymmetryClass::finite;
  if ((needs_axis && !spec.rotation_axis) ||
      (spec.symmetry_class == SymmetryClass::mirror && !spec.mirror_plane_axes))
    throw std::invalid_argument("symmetry spec incomplete");
  spec.validate();

  const Rot3 rc = canonical_rotation(spec);
  PointCloud rotated = transformed(model, rc, {0.0, 0.0, 0.0});
  const Vec3 c = rotated.centroid();
  PointCloud canonical = transformed(rotated, Rot3::identity(), -c);

  SymmetrySpec canon_spec = spec;
  const Rot3 rct = rc.transposed();
  for (Rot3& g : canon_spec.group) g = rc * g * rct;
  if (canon_spec.rotation_axis) canon_spec.rotation_axis = Vec3{0.0, 0.0, 1.0};
  if (canon_spec.mirror_plane_axes)
    canon_spec.mirror_plane_axes = {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 0.0, 1.0}};
  canon_spec.validate();

  ObjectModel out;
  out.id = std::move(id);
  out.model = std::move(canonical);
  out.symmetry = std::move(canon_spec);
  out.box = bounding_box(out.model);
  out.diameter = 2.0 * min_bounding_sphere(out.model).radius;
  out.eval_subsample = farthest_point_indices(
      out.model, kEvalSubsampleSize, derive_seed(0x62696e706f7365ULL, "eval-subsample", 0));
  return out;
}

}  // namespace binpose
