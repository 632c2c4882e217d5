#include "binpose/pipeline.hpp"

#include <stdexcept>

#include "binpose/pose_fit.hpp"

namespace binpose {

std::vector<std::uint32_t> visibility_filter(const PredictionField& field, double v_min) {
  if (v_min < 0.0 || v_min > 1.0)
    throw std::invalid_argument("v_min must lie in [0, 1]");
  std::vector<std::uint32_t> retained;
  for (std::size_t i = 0; i < field.n_points; ++i)
    if (field.visibility[i] >= v_min) retained.push_back(static_cast<std::uint32_t>(i));
  return retained;
}

std::vector<std::vector<std::uint32_t>> cluster_instances(
    const PredictionField& field, const std::vector<std::uint32_t>& retained,
    double bandwidth, int max_iters, double convergence_tol,
    std::size_t min_points) {
  std::vector<std::vector<std::uint32_t>> instances;
  if (retained.empty()) return instances;

  PointCloud votes;
  votes.reserve(retained.size());
  for (std::uint32_t i : retained) votes.push_back(field.keypoint(i, 0));
  const MeanShiftResult ms = mean_shift(votes, bandwidth, max_iters, convergence_tol);

  std::vector<std::vector<std::uint32_t>> by_mode(ms.modes.size());
  for (std::size_t s = 0; s < retained.size(); ++s)
    by_mode[static_cast<std::size_t>(ms.assignment[s])].push_back(retained[s]);
  for (auto& members : by_mode)
    if (members.size() >= min_points) instances.push_back(std::move(members));
  return instances;
}

std::optional<std::vector<Vec3>> vote_keypoints(const std::vector<std::uint32_t>& members,
                                                const PredictionField& field,
                                                const ClusterParams& params,
                                                bool filtering) {
  if (members.empty()) throw std::invalid_argument("empty instance");
  std::vector<Vec3> voted;
  voted.reserve(field.n_k);
  for (std::size_t j = 0; j < field.n_k; ++j) {
    PointCloud preds;
    preds.reserve(members.size());
    for (std::uint32_t i : members) preds.push_back(field.keypoint(i, j));
    if (filtering) {
      std::optional<PointCloud> kept = filter_keypoints(preds, params);
      if (!kept) return std::nullopt;
      voted.push_back(kept->centroid());
    } else {
      voted.push_back(preds.centroid());
    }
  }
  return voted;
}

RigidPose fit_pose(const std::vector<Vec3>& voted, const KeypointSet& canonical) {
  return fit_rigid(canonical.keypoints, voted);
}

std::vector<PoseEstimate> estimate_scene(const PointCloud& scene,
                                         const PredictionField& field,
                                         const ObjectModel& model,
                                         const KeypointSet& keypoints,
                                         const PipelineConfig& config) {
  field.validate();
  if (field.n_points != scene.size())
    throw std::invalid_argument("prediction field does not match scene size");
  if (field.n_k != keypoints.n_k())
    throw std::invalid_argument("prediction field does not match keypoint count");

  std::vector<PoseEstimate> estimates;
  const std::vector<std::uint32_t> retained = visibility_filter(field, config.v_min);
  if (retained.empty()) return estimates;

  ClusterParams params = config.cluster;
  params.diameter = model.diameter;
  const auto instances =
      cluster_instances(field, retained, params.bandwidth_abs(), params.max_iters,
                        params.convergence_tol_abs(), config.min_instance_points);

  for (const auto& members : instances) {
    std::optional<std::vector<Vec3>> voted =
        vote_keypoints(members, field, params, config.keypoint_filtering);
    if (!voted) continue;
    PoseEstimate est;
    est.pose = fit_pose(*voted, keypoints);
    double vis = 0.0;
    for (std::uint32_t i : members) vis += field.visibility[i];
    est.confidence = vis / static_cast<double>(members.size());
    est.instance.members = members;
    est.instance.voted = std::move(*voted);
    est.instance.confidence = est.confidence;
    estimates.push_back(std::move(est));
  }
  return estimates;
}

}  // namespace binpose
