#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "binpose/clustering.hpp"
#include "binpose/keypoints.hpp"
#include "binpose/object_model.hpp"
#include "binpose/prediction.hpp"

namespace binpose {

struct InstanceDetection {
  std::vector<std::uint32_t> members;  // scene point indices
  std::vector<Vec3> voted;             // one voted keypoint per type
  double confidence = 0.0;             // mean predicted visibility of members
};

struct PoseEstimate {
  RigidPose pose;
  double confidence = 0.0;
  InstanceDetection instance;
};

struct PipelineConfig {
  double v_min = 0.25;          // visibility threshold for scene points
  ClusterParams cluster;        // diameter is overridden from the model
  std::size_t min_instance_points = 10;
  bool keypoint_filtering = true;  // off: plain mean voting (ablation)
};

/// Indices of points whose predicted visibility is at least v_min.
std::vector<std::uint32_t> visibility_filter(const PredictionField& field, double v_min);

/// Groups retained points into instances by mean shift over their predicted
/// centroid keypoint (type 0). Instances below min_points are dropped.
std::vector<std::vector<std::uint32_t>> cluster_instances(
    const PredictionField& field, const std::vector<std::uint32_t>& retained,
    double bandwidth, int max_iters, double convergence_tol,
    std::size_t min_points);

/// Per keypoint type: filter the members' predictions down to the densest
/// cluster and average it. Returns nullopt when filtering rejects any type
/// (no keypoint cluster survives), which rejects the instance. With
/// filtering disabled the plain mean of all members' predictions is used.
std::optional<std::vector<Vec3>> vote_keypoints(const std::vector<std::uint32_t>& members,
                                                const PredictionField& field,
                                                const ClusterParams& params,
                                                bool filtering = true);

/// Rigid pose best mapping the canonical keypoints onto the voted ones.
RigidPose fit_pose(const std::vector<Vec3>& voted, const KeypointSet& canonical);

/// Full pipeline: visibility filter, instance clustering, per-type voting,
/// pose fitting. Instances rejected at any stage are omitted.
std::vector<PoseEstimate> estimate_scene(const PointCloud& scene,
                                         const PredictionField& field,
                                         const ObjectModel& model,
                                         const KeypointSet& keypoints,
                                         const PipelineConfig& config);

}  // namespace binpose
