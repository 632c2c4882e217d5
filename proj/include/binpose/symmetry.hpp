#pragma once

#include <array>
#include <optional>
#include <vector>

#include "binpose/geometry.hpp"

namespace binpose {

enum class SymmetryClass {
  no_proper,   // trivial proper symmetry group
  revolution,  // continuous rotation about an axis, plus optional flips
  mirror,      // reflection plane only, trivial proper group
  finite,      // nontrivial finite proper rotation group
};

const char* to_string(SymmetryClass c);
std::optional<SymmetryClass> symmetry_class_from_string(std::string_view s);

/// Number of samples used when a continuous revolution symmetry has to be
/// represented by a discrete set of rotations.
inline constexpr int kRevolutionSteps = 72;

/// Proper symmetry description of an object in its own frame.
///
/// `group` always lists the finite proper rotations, identity first. For
/// `revolution` it holds only the discrete part (identity plus any flip that
/// maps the axis to itself or its negation); the continuous part is implied
/// by `rotation_axis`.
struct SymmetrySpec {
  SymmetryClass symmetry_class = SymmetryClass::no_proper;
  std::optional<Vec3> rotation_axis;                      // revolution, finite
  std::optional<std::array<Vec3, 2>> mirror_plane_axes;   // mirror: span of the plane
  std::vector<Rot3> group{Rot3::identity()};

  /// Throws std::invalid_argument when the spec is inconsistent: group
  /// elements that are not rotations, missing identity, a group that is not
  /// closed, a revolution spec without a unit axis, flips that move the
  /// axis off itself, or a mirror spec without an orthonormal plane basis.
  void validate() const;

  /// Finite stand-in for the full proper group: the group itself, except for
  /// revolution where kRevolutionSteps rotations about the axis are composed
  /// with every discrete element.
  std::vector<Rot3> effective_group() const;
};

SymmetrySpec trivial_symmetry();

/// Rotation by `angle` about `axis` (unit vector).
Rot3 axis_rotation(const Vec3& axis, double angle);

/// Cyclic group C_n about `axis`, identity first.
std::vector<Rot3> cyclic_group(const Vec3& axis, int n);

/// Dihedral group D_n: C_n about `axis` plus n flips about `flip_axis`
/// (perpendicular to `axis`).
std::vector<Rot3> dihedral_group(const Vec3& axis, const Vec3& flip_axis, int n);

}  // namespace binpose
