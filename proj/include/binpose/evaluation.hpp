#pragma once

#include <cstddef>
#include <vector>

#include "binpose/keypoints.hpp"
#include "binpose/object_model.hpp"
#include "binpose/pipeline.hpp"
#include "binpose/synth.hpp"

namespace binpose {

struct PoseDistanceResult {
  double distance = 0.0;     // RMS over the model's evaluation subsample
  std::size_t group_index = 0;  // minimizing element of symmetry.group
  double axis_angle = 0.0;      // revolution: optimal rotation about the axis
};

/// Symmetry-aware pose discrepancy: the minimum over the object's proper
/// symmetry group of the RMS displacement between the two posed copies of
/// the model's evaluation subsample. For revolution symmetry the optimal
/// axis rotation has a closed form, so the quotient is exact rather than
/// discretized.
PoseDistanceResult pose_distance(const RigidPose& p1, const RigidPose& p2,
                                 const ObjectModel& model);

enum class MatchOutcome { tp, fp, ignored };

struct MatchedEstimate {
  double confidence = 0.0;
  MatchOutcome outcome = MatchOutcome::fp;
  double distance = 0.0;  // to the matched truth, for true positives
};

/// Greedy one-to-one matching in confidence order (ties: lower index).
/// A truth instance is eligible when its visibility is at least
/// min_visibility; estimates landing within threshold on an ineligible
/// truth are ignored (neither TP nor FP).
std::vector<MatchedEstimate> match_estimates(const std::vector<PoseEstimate>& estimates,
                                             const Scene& truth,
                                             const ObjectModel& model,
                                             double threshold_frac,
                                             double min_visibility);

std::size_t count_eligible(const Scene& truth, double min_visibility);

struct PRCurve {
  std::vector<double> recall;     // nondecreasing
  std::vector<double> precision;
  double ap = 0.0;
};

/// Precision-recall curve and its step-interpolated area from pooled match
/// outcomes (ignored entries contribute nothing). eligible_truths is the
/// recall denominator.
PRCurve pr_curve(std::vector<MatchedEstimate> matches, std::size_t eligible_truths);

struct EvalDefaults {
  double threshold_frac = 0.1;   // of the minimum bounding sphere diameter
  double min_visibility = 0.5;
};

/// Mean absolute error of predicted visibility against the instance truth.
double visibility_loss(const PredictionField& pred, const Scene& truth);

/// Mean over points of the summed per-type distance to the nearest
/// pose-transformed equivalent keypoint. use_equivalents=false compares
/// against the canonical keypoint only.
double keypoint_loss(const PredictionField& pred, const Scene& truth,
                     const KeypointSet& keypoints, bool use_equivalents = true);

}  // namespace binpose
