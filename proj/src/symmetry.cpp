#include "binpose/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace binpose {

const char* to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::no_proper: return "no_proper";
    case SymmetryClass::revolution: return "revolution";
    case SymmetryClass::mirror: return "mirror";
    case SymmetryClass::finite: return "finite";
  }
  return "?";
}

std::optional<SymmetryClass> symmetry_class_from_string(std::string_view s) {
  if (s == "no_proper") return SymmetryClass::no_proper;
  if (s == "revolution") return SymmetryClass::revolution;
  if (s == "mirror") return SymmetryClass::mirror;
  if (s == "finite") return SymmetryClass::finite;
  return std::nullopt;
}

Rot3 axis_rotation(const Vec3& axis, double angle) {
  return Rot3::axis_angle(axis, angle);
}

std::vector<Rot3> cyclic_group(const Vec3& axis, int n) {
  if (n < 1) throw std::invalid_argument("cyclic group order must be positive");
  std::vector<Rot3> g;
  g.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    g.push_back(axis_rotation(axis, 2.0 * std::numbers::pi * k / n));
  g[0] = Rot3::identity();
  return g;
}

std::vector<Rot3> dihedral_group(const Vec3& axis, const Vec3& flip_axis, int n) {
  if (std::abs(axis.dot(flip_axis)) > 1e-9)
    throw std::invalid_argument("dihedral flip axis must be perpendicular to the main axis");
  std::vector<Rot3> g = cyclic_group(axis, n);
  const Rot3 flip = axis_rotation(flip_axis, std::numbers::pi);
  for (int k = 0; k < n; ++k) g.push_back(g[static_cast<std::size_t>(k)] * flip);
  return g;
}

namespace {

bool maps_axis_to_itself_or_negation(const Rot3& r, const Vec3& axis, double tol) {
  Vec3 img = r.apply(axis);
  return (img - axis).norm() <= tol || (img + axis).norm() <= tol;
}

}  // namespace

void SymmetrySpec::validate() const {
  if (group.empty()) throw std::invalid_argument("symmetry group is empty");
  if (group[0].max_abs_diff(Rot3::identity()) > 1e-9)
    throw std::invalid_argument("symmetry group must list identity first");
  for (const Rot3& g : group)
    if (!g.is_rotation(1e-9))
      throw std::invalid_argument("symmetry group element is not a rotation");
  for (const Rot3& a : group)
    for (const Rot3& b : group) {
      const Rot3 ab = a * b;
      bool closed = false;
      for (const Rot3& c : group)
        if (ab.max_abs_diff(c) <= 1e-6) {
          closed = true;
          break;
        }
      if (!closed) throw std::invalid_argument("symmetry group is not closed");
    }

  if (symmetry_class == SymmetryClass::revolution ||
      symmetry_class == SymmetryClass::finite) {
    if (!rotation_axis)
      throw std::invalid_argument(symmetry_class == SymmetryClass::revolution
                                      ? "revolution symmetry needs an axis"
                                      : "finite symmetry needs an axis");
    if (std::abs(rotation_axis->norm() - 1.0) > 1e-9)
      throw std::invalid_argument("rotation axis must be a unit vector");
    for (const Rot3& g : group)
      if (!maps_axis_to_itself_or_negation(g, *rotation_axis, 1e-6))
        throw std::invalid_argument("symmetry group element moves the axis");
  }
  if (symmetry_class == SymmetryClass::mirror) {
    if (!mirror_plane_axes)
      throw std::invalid_argument("mirror symmetry needs a plane basis");
    const auto& [a1, a2] = *mirror_plane_axes;
    if (std::abs(a1.norm() - 1.0) > 1e-9 || std::abs(a2.norm() - 1.0) > 1e-9 ||
        std::abs(a1.dot(a2)) > 1e-9)
      throw std::invalid_argument("mirror plane basis must be orthonormal");
  }
  if (symmetry_class == SymmetryClass::no_proper && group.size() != 1)
    throw std::invalid_argument("no_proper symmetry must have a trivial group");
}

std::vector<Rot3> SymmetrySpec::effective_group() const {
  if (symmetry_class != SymmetryClass::revolution) return group;
  std::vector<Rot3> g;
  g.reserve(static_cast<std::size_t>(kRevolutionSteps) * group.size());
  for (int k = 0; k < kRevolutionSteps; ++k) {
    const Rot3 rz = k == 0
                        ? Rot3::identity()
                        : axis_rotation(*rotation_axis,
                                        2.0 * std::numbers::pi * k / kRevolutionSteps);
    for (const Rot3& h : group) g.push_back(rz * h);
  }
  return g;
}

SymmetrySpec trivial_symmetry() { return SymmetrySpec{}; }

}  // namespace binpose
