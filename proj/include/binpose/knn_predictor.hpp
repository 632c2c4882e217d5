#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "binpose/neighbor_index.hpp"
#include "binpose/self_training.hpp"

namespace binpose {

inline constexpr std::size_t kDescriptorSize = 6;

/// Rotation-covariant local reference frame plus a rotation-invariant
/// descriptor: principal spreads of the neighborhood covariance and the
/// centroid offset expressed in the frame, all divided by the radius.
struct LocalFrame {
  Rot3 rotation;  // columns x, y, z; x = largest spread, z = smallest
  std::array<double, kDescriptorSize> descriptor{};
};

LocalFrame local_frame(const PointCloud& cloud, const NeighborIndex& index,
                       std::uint32_t point, double radius);

struct KnnEntry {
  std::array<double, kDescriptorSize> descriptor{};
  std::vector<Vec3> offsets;  // per keypoint type, local-frame coords
  double visibility = 0.0;
};

struct KnnConfig {
  double radius = 0.02;  // descriptor neighborhood, scene units
  std::size_t max_entries = 4000;
  std::uint64_t seed = 0;
  bool retain_source = true;  // students keep the initial training data
};

/// Nearest-descriptor regressor: each scene point takes the keypoint offsets
/// and visibility of the closest stored descriptor, with offsets rotated back
/// through the point's own local frame.
class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(std::vector<KnnEntry> entries, std::size_t n_k, double radius);
  PredictionField predict(const PointCloud& scene) const override;
  std::size_t entry_count() const { return entries_.size(); }

 private:
  std::vector<KnnEntry> entries_;
  std::size_t n_k_;
  double radius_;
};

/// Builds a KnnPredictor database from every mask-1 point of the given scenes
/// plus the construction-time scenes (kept when retain_source is set, or when
/// train is called with nothing else). Oversized databases are subsampled
/// deterministically from the config seed.
class KnnTrainer final : public Trainer {
 public:
  explicit KnnTrainer(KnnConfig config, std::vector<LabeledScene> source = {});
  std::shared_ptr<const Predictor> train(
      const std::vector<LabeledScene>& scenes) const override;

 private:
  KnnConfig config_;
  std::vector<LabeledScene> source_;
};

}  // namespace binpose
