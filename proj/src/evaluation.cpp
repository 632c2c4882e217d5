#include "binpose/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace binpose {

namespace {

/// RMS displacement between the two posed copies of the subsample when p1 is
/// additionally pre-rotated about the object z axis by the best angle.
/// Minimizes sum |R1 Rz(theta) x + t1 - (R2 x + t2)|^2 in closed form.
double revolution_rms(const RigidPose& p1, const RigidPose& p2,
                      const std::vector<Vec3>& pts, double* best_theta) {
  const Rot3 r1t = p1.rotation.transposed();
  double c_sum = 0.0, s_sum = 0.0, k_sum = 0.0, norms = 0.0;
  for (const Vec3& x : pts) {
    const Vec3 q = p2.apply(x) - p1.translation;
    const Vec3 u = r1t.apply(q);
    c_sum += u.x * x.x + u.y * x.y;
    s_sum += u.y * x.x - u.x * x.y;
    k_sum += u.z * x.z;
    norms += x.squared_norm() + q.squared_norm();
  }
  const double theta = std::atan2(s_sum, c_sum);
  if (best_theta) *best_theta = theta;
  const double gain = std::sqrt(c_sum * c_sum + s_sum * s_sum) + k_sum;
  const double sq = std::max(0.0, norms - 2.0 * gain);
  return std::sqrt(sq / static_cast<double>(pts.size()));
}

double rms_between(const RigidPose& p1, const RigidPose& p2,
                   const std::vector<Vec3>& pts) {
  double sum = 0.0;
  for (const Vec3& x : pts) sum += (p1.apply(x) - p2.apply(x)).squared_norm();
  return std::sqrt(sum / static_cast<double>(pts.size()));
}

}  // namespace

PoseDistanceResult pose_distance(const RigidPose& p1, const RigidPose& p2,
                                 const ObjectModel& model) {
  if (model.eval_subsample.empty())
    throw std::invalid_argument("model has no evaluation subsample");
  std::vector<Vec3> pts;
  pts.reserve(model.eval_subsample.size());
  for (std::size_t i : model.eval_subsample) pts.push_back(model.model.point(i));

  PoseDistanceResult best;
  best.distance = std::numeric_limits<double>::infinity();
  const bool revolution = model.symmetry.symmetry_class == SymmetryClass::revolution;
  for (std::size_t gi = 0; gi < model.symmetry.group.size(); ++gi) {
    const Rot3& g = model.symmetry.group[gi];
    const RigidPose p1g{p1.rotation * g, p1.translation};
    double theta = 0.0;
    const double d = revolution ? revolution_rms(p1g, p2, pts, &theta)
                                : rms_between(p1g, p2, pts);
    if (d < best.distance) {
      best.distance = d;
      best.group_index = gi;
      best.axis_angle = theta;
    }
  }
  return best;
}

std::size_t count_eligible(const Scene& truth, double min_visibility) {
  std::size_t n = 0;
  for (double v : truth.visibility)
    if (v >= min_visibility) ++n;
  return n;
}

std::vector<MatchedEstimate> match_estimates(const std::vector<PoseEstimate>& estimates,
                                             const Scene& truth,
                                             const ObjectModel& model,
                                             double threshold_frac,
                                             double min_visibility) {
  if (threshold_frac <= 0.0)
    throw std::invalid_argument("threshold fraction must be positive");
  const double threshold = threshold_frac * model.diameter;

  std::vector<std::size_t> order(estimates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return estimates[a].confidence > estimates[b].confidence;
  });

  std::vector<bool> truth_taken(truth.poses.size(), false);
  std::vector<MatchedEstimate> out(estimates.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t e = order[rank];
    MatchedEstimate& m = out[e];
    m.confidence = estimates[e].confidence;

    double best_eligible = std::numeric_limits<double>::infinity();
    double best_ineligible = std::numeric_limits<double>::infinity();
    std::size_t best_truth = truth.poses.size();
    for (std::size_t t = 0; t < truth.poses.size(); ++t) {
      const bool eligible = truth.visibility[t] >= min_visibility;
      if (eligible && truth_taken[t]) continue;
      const double d =
          pose_distance(estimates[e].pose, truth.poses[t], model).distance;
      if (eligible) {
        if (d < best_eligible) {
          best_eligible = d;
          best_truth = t;
        }
      } else {
        best_ineligible = std::min(best_ineligible, d);
      }
    }

    if (best_eligible <= threshold && best_eligible <= best_ineligible) {
      m.outcome = MatchOutcome::tp;
      m.distance = best_eligible;
      truth_taken[best_truth] = true;
    } else if (best_ineligible <= threshold) {
      m.outcome = MatchOutcome::ignored;
    } else {
      m.outcome = MatchOutcome::fp;
    }
  }
  return out;
}

PRCurve pr_curve(std::vector<MatchedEstimate> matches, std::size_t eligible_truths) {
  std::stable_sort(matches.begin(), matches.end(),
                   [](const MatchedEstimate& a, const MatchedEstimate& b) {
                     return a.confidence > b.confidence;
                   });
  PRCurve curve;
  std::size_t tp = 0, fp = 0;
  for (const MatchedEstimate& m : matches) {
    if (m.outcome == MatchOutcome::ignored) continue;
    if (m.outcome == MatchOutcome::tp) ++tp;
    else ++fp;
    curve.recall.push_back(eligible_truths == 0
                               ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(eligible_truths));
    curve.precision.push_back(static_cast<double>(tp) /
                              static_cast<double>(tp + fp));
  }

  // Step-interpolated area: precision envelope from the right, accumulated
  // over recall increments.
  double ap = 0.0, envelope = 0.0, prev_recall = 0.0;
  std::vector<double> env(curve.precision.size());
  for (std::size_t i = curve.precision.size(); i-- > 0;) {
    envelope = std::max(envelope, curve.precision[i]);
    env[i] = envelope;
  }
  for (std::size_t i = 0; i < curve.recall.size(); ++i) {
    ap += (curve.recall[i] - prev_recall) * env[i];
    prev_recall = curve.recall[i];
  }
  curve.ap = ap;
  return curve;
}

double visibility_loss(const PredictionField& pred, const Scene& truth) {
  pred.validate();
  if (pred.n_points != truth.cloud.size() || !truth.cloud.instance_ids)
    throw std::invalid_argument("prediction field does not match scene");
  if (pred.n_points == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.n_points; ++i) {
    const auto inst = static_cast<std::size_t>((*truth.cloud.instance_ids)[i]);
    sum += std::abs(pred.visibility[i] - truth.visibility[inst]);
  }
  return sum / static_cast<double>(pred.n_points);
}

double keypoint_loss(const PredictionField& pred, const Scene& truth,
                     const KeypointSet& keypoints, bool use_equivalents) {
  pred.validate();
  if (pred.n_points != truth.cloud.size() || !truth.cloud.instance_ids)
    throw std::invalid_argument("prediction field does not match scene");
  if (pred.n_k != keypoints.n_k())
    throw std::invalid_argument("keypoint count mismatch");
  if (pred.n_points == 0) return 0.0;

  // Pose-transformed targets per instance and type.
  const std::size_t n_inst = truth.poses.size();
  std::vector<std::vector<std::vector<Vec3>>> targets(n_inst);
  for (std::size_t k = 0; k < n_inst; ++k) {
    targets[k].resize(pred.n_k);
    for (std::size_t j = 0; j < pred.n_k; ++j) {
      if (use_equivalents) {
        for (const Vec3& q : keypoints.equivalents[j])
          targets[k][j].push_back(truth.poses[k].apply(q));
      } else {
        targets[k][j].push_back(truth.poses[k].apply(keypoints.keypoints[j]));
      }
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < pred.n_points; ++i) {
    const auto inst = static_cast<std::size_t>((*truth.cloud.instance_ids)[i]);
    for (std::size_t j = 0; j < pred.n_k; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : targets[inst][j])
        best = std::min(best, distance(pred.keypoint(i, j), q));
      sum += best;
    }
  }
  return sum / static_cast<double>(pred.n_points);
}

}  // namespace binpose
