#pragma once

#include <vector>

#include "binpose/geometry.hpp"

namespace binpose {

/// Least-squares rigid fit: minimizes sum_j |target_j - (R * source_j + t)|^2
/// over rotations R and translations t, via the centered cross-covariance
/// SVD with determinant correction (never a reflection). Collinear inputs
/// (rank-deficient covariance, e.g. two keypoints) get the minimal rotation
/// taking the source direction to the target direction, which still attains
/// the optimal residual and is deterministic.
/// Throws std::invalid_argument("underdetermined") for fewer than two pairs
/// and on length mismatch.
RigidPose fit_rigid(const std::vector<Vec3>& source, const std::vector<Vec3>& target);

/// Squared-error objective of a candidate pose, for residual checks.
double fit_residual(const std::vector<Vec3>& source, const std::vector<Vec3>& target,
                    const RigidPose& pose);

}  // namespace binpose
