#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "binpose/evaluation.hpp"
#include "binpose/pipeline.hpp"
#include "binpose/synth.hpp"

namespace binpose {

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictionField predict(const PointCloud& scene) const = 0;
};

/// Per-point training targets plus mask bits. Points of accepted instances
/// carry the instance's pose-transformed keypoint equivalent sets and its
/// visibility; everything else is masked out.
struct PseudoLabelSet {
  std::size_t n_points = 0;
  std::size_t n_k = 0;
  std::vector<std::uint8_t> mask;          // per point
  std::vector<std::int32_t> instance_of;   // accepted-instance index or -1

  struct InstanceLabels {
    std::vector<std::uint32_t> members;
    RigidPose pose;
    std::vector<std::vector<Vec3>> keypoint_equivalents;  // per type
    double visibility = 0.0;
  };
  std::vector<InstanceLabels> instances;
};

struct LabeledScene {
  PointCloud cloud;
  PseudoLabelSet labels;
};

class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual std::shared_ptr<const Predictor> train(
      const std::vector<LabeledScene>& scenes) const = 0;
};

/// One-directional mean nearest-neighbor distance from each observed point
/// to the backprojected model cloud. Asymmetric on purpose: observed is a
/// partial view, backprojected is complete. Throws on empty input.
double semi_chamfer(const PointCloud& observed, const PointCloud& backprojected);

/// Both directions averaged; only for the ablation comparing against the
/// one-directional score.
double chamfer_bidirectional(const PointCloud& observed,
                             const PointCloud& backprojected);

struct QualityScore {
  std::size_t estimate_index = 0;
  double d = 0.0;
};

/// Semi-chamfer between each estimate's member points and its backprojected
/// model cloud. Estimates without members are skipped.
std::vector<QualityScore> score_scene(const Scene& scene,
                                      const std::vector<PoseEstimate>& estimates,
                                      const ObjectModel& model,
                                      bool bidirectional = false);

/// mean + kappa * population standard deviation.
/// Throws std::invalid_argument("insufficient scores") for fewer than two.
double dynamic_threshold(const std::vector<double>& scores, double kappa);

/// Accepts estimates with d strictly below d_g; their members get keypoint
/// labels (pose-transformed equivalent sets), visibility N_i/N_max over the
/// scene's detected instances, and mask 1. All other points get mask 0.
PseudoLabelSet make_pseudo_labels(const Scene& scene,
                                  const std::vector<PoseEstimate>& estimates,
                                  const std::vector<QualityScore>& scores,
                                  double d_g, const KeypointSet& keypoints);

/// Ground-truth labels in pseudo-label form (every point mask 1), for
/// training on the source domain.
PseudoLabelSet ground_truth_labels(const Scene& scene, const KeypointSet& keypoints);

struct SelfTrainConfig {
  PipelineConfig pipeline;
  double kappa = 0.0;
  bool bidirectional_chamfer = false;
  bool use_equivalents = true;  // off: singleton label sets (ablation)
};

struct RoundReport {
  int round = 0;
  std::size_t estimates = 0;
  std::size_t accepted = 0;
  double mean_d = 0.0;
  double mean_threshold = 0.0;
};

struct SelfTrainResult {
  std::shared_ptr<const Predictor> predictor;
  std::vector<std::shared_ptr<const Predictor>> round_predictors;
  std::vector<RoundReport> rounds;
  bool halted_early = false;
};

/// Teacher-student rounds: estimate poses on every scene with the current
/// teacher, score them, threshold per scene, build pseudo-labels, train the
/// student, repeat with the student as teacher. Halts early when a round
/// accepts nothing (the teacher is returned unchanged). Scenes with fewer
/// than two scored estimates contribute only masked-out labels.
SelfTrainResult self_train(std::shared_ptr<const Predictor> teacher,
                           const std::vector<Scene>& scenes, const Trainer& trainer,
                           const ObjectModel& model, const KeypointSet& keypoints,
                           int rounds, const SelfTrainConfig& config);

}  // namespace binpose
