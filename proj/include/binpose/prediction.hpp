#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "binpose/geometry.hpp"

namespace binpose {

/// Per-scene-point network-style output: n_k predicted keypoint positions
/// (the point plus its predicted offsets) and a visibility estimate.
struct PredictionField {
  std::size_t n_points = 0;
  std::size_t n_k = 0;
  std::vector<Vec3> keypoints;    // n_points * n_k, row-major [point][type]
  std::vector<double> visibility; // n_points

  const Vec3& keypoint(std::size_t point, std::size_t type) const {
    return keypoints[point * n_k + type];
  }
  Vec3& keypoint(std::size_t point, std::size_t type) {
    return keypoints[point * n_k + type];
  }

  void validate() const {
    if (keypoints.size() != n_points * n_k || visibility.size() != n_points)
      throw std::invalid_argument("prediction field shape mismatch");
  }
};

}  // namespace binpose
