#include "binpose/self_training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "binpose/neighbor_index.hpp"

namespace binpose {

namespace {

double mean_nearest_distance(const PointCloud& from, const NeighborIndex& to_index) {
  double sum = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    sum += to_index.nearest(from.point(i)).distance;
  }
  return sum / static_cast<double>(from.size());
}

PseudoLabelSet empty_labels(std::size_t n_points, std::size_t n_k) {
  PseudoLabelSet labels;
  labels.n_points = n_points;
  labels.n_k = n_k;
  labels.mask.assign(n_points, 0);
  labels.instance_of.assign(n_points, -1);
  return labels;
}

std::vector<std::vector<Vec3>> transformed_equivalents(const RigidPose& pose,
                                                       const KeypointSet& keypoints,
                                                       bool use_equivalents) {
  std::vector<std::vector<Vec3>> out(keypoints.n_k());
  for (std::size_t j = 0; j < keypoints.n_k(); ++j) {
    if (use_equivalents) {
      out[j].reserve(keypoints.equivalents[j].size());
      for (const Vec3& e : keypoints.equivalents[j]) out[j].push_back(pose.apply(e));
    } else {
      out[j].push_back(pose.apply(keypoints.keypoints[j]));
    }
  }
  return out;
}

}  // namespace

double semi_chamfer(const PointCloud& observed, const PointCloud& backprojected) {
  if (observed.empty() || backprojected.empty()) {
    throw std::invalid_argument("empty cloud");
  }
  NeighborIndex index(backprojected);
  return mean_nearest_distance(observed, index);
}

double chamfer_bidirectional(const PointCloud& observed,
                             const PointCloud& backprojected) {
  if (observed.empty() || backprojected.empty()) {
    throw std::invalid_argument("empty cloud");
  }
  NeighborIndex forward(backprojected);
  NeighborIndex backward(observed);
  return 0.5 * (mean_nearest_distance(observed, forward) +
                mean_nearest_distance(backprojected, backward));
}

std::vector<QualityScore> score_scene(const Scene& scene,
                                      const std::vector<PoseEstimate>& estimates,
                                      const ObjectModel& model, bool bidirectional) {
  std::vector<QualityScore> scores;
  scores.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& members = estimates[i].instance.members;
    if (members.empty()) continue;
    PointCloud observed = scene.cloud.select(members);
    PointCloud back = apply_pose(estimates[i].pose, model.model);
    double d = bidirectional ? chamfer_bidirectional(observed, back)
                             : semi_chamfer(observed, back);
    scores.push_back({i, d});
  }
  return scores;
}

double dynamic_threshold(const std::vector<double>& scores, double kappa) {
  if (scores.size() < 2) throw std::invalid_argument("insufficient scores");
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scores.size());
  return mean + kappa * std::sqrt(var);
}

PseudoLabelSet make_pseudo_labels(const Scene& scene,
                                  const std::vector<PoseEstimate>& estimates,
                                  const std::vector<QualityScore>& scores,
                                  double d_g, const KeypointSet& keypoints) {
  PseudoLabelSet labels = empty_labels(scene.cloud.size(), keypoints.n_k());

  std::size_t n_max = 0;
  for (const auto& est : estimates) {
    n_max = std::max(n_max, est.instance.members.size());
  }
  if (n_max == 0) return labels;

  for (const auto& score : scores) {
    if (!(score.d < d_g)) continue;
    const auto& est = estimates[score.estimate_index];
    PseudoLabelSet::InstanceLabels inst;
    inst.members = est.instance.members;
    inst.pose = est.pose;
    inst.keypoint_equivalents = transformed_equivalents(est.pose, keypoints, true);
    inst.visibility = static_cast<double>(inst.members.size()) / static_cast<double>(n_max);
    auto idx = static_cast<std::int32_t>(labels.instances.size());
    for (std::uint32_t m : inst.members) {
      labels.mask[m] = 1;
      labels.instance_of[m] = idx;
    }
    labels.instances.push_back(std::move(inst));
  }
  return labels;
}

PseudoLabelSet ground_truth_labels(const Scene& scene, const KeypointSet& keypoints) {
  if (!scene.cloud.instance_ids) throw std::invalid_argument("scene lacks instance ids");
  PseudoLabelSet labels = empty_labels(scene.cloud.size(), keypoints.n_k());

  labels.instances.resize(scene.poses.size());
  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    auto& inst = labels.instances[i];
    inst.pose = scene.poses[i];
    inst.keypoint_equivalents = transformed_equivalents(inst.pose, keypoints, true);
    inst.visibility = scene.visibility[i];
  }
  const auto& ids = *scene.cloud.instance_ids;
  for (std::size_t p = 0; p < ids.size(); ++p) {
    auto id = static_cast<std::size_t>(ids[p]);
    if (id >= labels.instances.size()) throw std::invalid_argument("instance id out of range");
    labels.mask[p] = 1;
    labels.instance_of[p] = ids[p];
    labels.instances[id].members.push_back(static_cast<std::uint32_t>(p));
  }
  return labels;
}

SelfTrainResult self_train(std::shared_ptr<const Predictor> teacher,
                           const std::vector<Scene>& scenes, const Trainer& trainer,
                           const ObjectModel& model, const KeypointSet& keypoints,
                           int rounds, const SelfTrainConfig& config) {
  if (!teacher) throw std::invalid_argument("null teacher");
  if (rounds < 1) throw std::invalid_argument("rounds must be positive");

  KeypointSet label_keypoints = keypoints;
  if (!config.use_equivalents) {
    for (std::size_t j = 0; j < label_keypoints.n_k(); ++j) {
      label_keypoints.equivalents[j] = {label_keypoints.keypoints[j]};
    }
  }

  SelfTrainResult result;
  result.predictor = teacher;

  for (int round = 0; round < rounds; ++round) {
    RoundReport report;
    report.round = round;
    double d_sum = 0.0;
    std::size_t d_count = 0;
    double threshold_sum = 0.0;
    std::size_t threshold_count = 0;

    std::vector<LabeledScene> labeled;
    labeled.reserve(scenes.size());
    for (const Scene& scene : scenes) {
      PredictionField field = result.predictor->predict(scene.cloud);
      std::vector<PoseEstimate> estimates =
          estimate_scene(scene.cloud, field, model, keypoints, config.pipeline);
      std::vector<QualityScore> scores =
          score_scene(scene, estimates, model, config.bidirectional_chamfer);
      report.estimates += estimates.size();

      PseudoLabelSet labels;
      if (scores.size() < 2) {
        labels = make_pseudo_labels(scene, {}, {}, 0.0, label_keypoints);
      } else {
        std::vector<double> values;
        values.reserve(scores.size());
        for (const auto& score : scores) values.push_back(score.d);
        double d_g = dynamic_threshold(values, config.kappa);
        threshold_sum += d_g;
        ++threshold_count;
        labels = make_pseudo_labels(scene, estimates, scores, d_g, label_keypoints);
      }
      for (const auto& score : scores) {
        d_sum += score.d;
        ++d_count;
      }
      report.accepted += labels.instances.size();
      labeled.push_back({scene.cloud, std::move(labels)});
    }

    report.mean_d = d_count ? d_sum / static_cast<double>(d_count) : 0.0;
    report.mean_threshold =
        threshold_count ? threshold_sum / static_cast<double>(threshold_count) : 0.0;
    result.rounds.push_back(report);

    if (report.accepted == 0) {
      result.halted_early = true;
      break;
    }
    result.predictor = trainer.train(labeled);
    result.round_predictors.push_back(result.predictor);
  }
  return result;
}

}  // namespace binpose
