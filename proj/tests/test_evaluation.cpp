#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "binpose/evaluation.hpp"
#include "binpose/synth.hpp"

using namespace binpose;

namespace {

RigidPose random_pose(std::mt19937_64& rng, double span = 0.3) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  Vec3 axis{gauss(rng), gauss(rng), gauss(rng)};
  return {Rot3::axis_angle(axis.normalized(), ang(rng)),
          Vec3{gauss(rng) * span, gauss(rng) * span, gauss(rng) * span}};
}

PoseEstimate make_estimate(const RigidPose& pose, double confidence) {
  PoseEstimate est;
  est.pose = pose;
  est.confidence = confidence;
  return est;
}

Scene truth_scene(std::vector<RigidPose> poses, std::vector<double> visibility) {
  Scene scene;
  scene.poses = std::move(poses);
  scene.visibility = std::move(visibility);
  return scene;
}

}  // namespace

TEST_CASE("pose_distance of identical poses is zero") {
  ObjectModel model = zoo_object("tetra", 300);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    RigidPose p = random_pose(rng);
    CHECK(pose_distance(p, p, model).distance < 1e-12);
  }
}

TEST_CASE("pose_distance of a pure translation is the offset length") {
  ObjectModel model = zoo_object("tetra", 300);
  std::mt19937_64 rng(2);
  RigidPose p = random_pose(rng);
  RigidPose q = p;
  q.translation += Vec3{0.03, -0.04, 0.12};
  CHECK(pose_distance(p, q, model).distance ==
        doctest::Approx(0.13).epsilon(1e-9));
}

TEST_CASE("pose_distance quotients the finite symmetry group") {
  ObjectModel model = zoo_object("brick", 400);
  std::mt19937_64 rng(3);
  for (std::size_t gi = 0; gi < model.symmetry.group.size(); ++gi) {
    RigidPose truth = random_pose(rng);
    RigidPose est{truth.rotation * model.symmetry.group[gi], truth.translation};
    PoseDistanceResult r = pose_distance(est, truth, model);
    CHECK(r.distance < 1e-9);
    // est composed with the inverse element recovers truth; for this group
    // every element is its own inverse
    CHECK(r.group_index == gi);
  }
}

TEST_CASE("pose_distance is approximately argument-symmetric for finite groups") {
  // the eval subsample is not exactly group-invariant, so the quotient metric
  // is only symmetric up to the subsample's deviation from invariance
  ObjectModel model = zoo_object("hexprism", 400);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    RigidPose a = random_pose(rng), b = random_pose(rng);
    double ab = pose_distance(a, b, model).distance;
    double ba = pose_distance(b, a, model).distance;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-2));
  }
}

TEST_CASE("revolution pose distance is exact for any axis angle") {
  ObjectModel model = zoo_object("cylinder", 400);
  std::mt19937_64 rng(5);
  for (double alpha : {0.013, 0.7, 2.0, 3.9, 6.1}) {
    RigidPose truth = random_pose(rng);
    RigidPose est{truth.rotation * Rot3::axis_angle({0, 0, 1}, alpha),
                  truth.translation};
    PoseDistanceResult r = pose_distance(est, truth, model);
    CHECK(r.distance < 1e-7);
  }
}

TEST_CASE("revolution closed form lower-bounds the discretized search") {
  ObjectModel model = zoo_object("cylinder", 400);
  std::vector<Vec3> pts;
  for (std::size_t i : model.eval_subsample) pts.push_back(model.model.point(i));

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    RigidPose a = random_pose(rng), b = random_pose(rng);
    double closed = pose_distance(a, b, model).distance;

    double disc = 1e18;
    for (const Rot3& g : model.symmetry.group) {
      for (int k = 0; k < 7200; ++k) {
        double ang = 2.0 * std::numbers::pi * k / 7200.0;
        Rot3 ra = a.rotation * g * Rot3::axis_angle({0, 0, 1}, ang);
        double sum = 0.0;
        for (const Vec3& x : pts)
          sum += squared_distance(ra.apply(x) + a.translation, b.apply(x));
        disc = std::min(disc, std::sqrt(sum / double(pts.size())));
      }
    }
    CHECK(closed <= disc + 1e-12);
    CHECK(disc - closed < 1e-4 * model.diameter);
  }
}

TEST_CASE("revolution result reports the optimal axis angle") {
  ObjectModel model = zoo_object("cylinder", 400);
  std::mt19937_64 rng(7);
  RigidPose truth = random_pose(rng);
  double alpha = 0.7;
  RigidPose est{truth.rotation * Rot3::axis_angle({0, 0, 1}, alpha),
                truth.translation};
  PoseDistanceResult r = pose_distance(est, truth, model);
  REQUIRE(r.distance < 1e-7);
  if (r.group_index == 0) {
    CHECK(std::abs(std::remainder(r.axis_angle + alpha, 2.0 * std::numbers::pi)) <
          1e-6);
  }
}

TEST_CASE("count_eligible uses an inclusive visibility threshold") {
  Scene scene = truth_scene({RigidPose{}, RigidPose{}, RigidPose{}},
                            {0.49, 0.5, 0.9});
  CHECK(count_eligible(scene, 0.5) == 2);
  CHECK(count_eligible(scene, 0.0) == 3);
  CHECK(count_eligible(scene, 0.9) == 1);
}

TEST_CASE("match_estimates classifies tp, ignored, and fp") {
  ObjectModel model = zoo_object("tetra", 300);
  std::mt19937_64 rng(8);
  RigidPose visible = random_pose(rng);
  RigidPose buried = random_pose(rng);
  buried.translation += Vec3{1.0, 0, 0};  // keep the two far apart
  Scene scene = truth_scene({visible, buried}, {1.0, 0.2});

  RigidPose far = visible;
  far.translation += Vec3{0, 0, 10.0};
  std::vector<PoseEstimate> estimates{
      make_estimate(visible, 0.9),  // exact hit on the eligible truth
      make_estimate(buried, 0.8),   // exact hit on the ineligible truth
      make_estimate(far, 0.7),      // near nothing
  };
  auto matches = match_estimates(estimates, scene, model, 0.1, 0.5);
  REQUIRE(matches.size() == 3);
  CHECK(matches[0].outcome == MatchOutcome::tp);
  CHECK(matches[0].distance < 1e-9);
  CHECK(matches[1].outcome == MatchOutcome::ignored);
  CHECK(matches[2].outcome == MatchOutcome::fp);
}

TEST_CASE("match_estimates is one-to-one in confidence order") {
  ObjectModel model = zoo_object("tetra", 300);
  std::mt19937_64 rng(9);
  RigidPose truth = random_pose(rng);
  Scene scene = truth_scene({truth}, {1.0});

  RigidPose nudged = truth;
  nudged.translation += Vec3{0.001, 0, 0};
  std::vector<PoseEstimate> estimates{
      make_estimate(nudged, 0.6),  // lower confidence, slightly closer match
      make_estimate(truth, 0.9),   // higher confidence, matched first
  };
  auto matches = match_estimates(estimates, scene, model, 0.1, 0.5);
  CHECK(matches[1].outcome == MatchOutcome::tp);
  CHECK(matches[0].outcome == MatchOutcome::fp);  // truth already taken
}

TEST_CASE("match boundary is inclusive in the distance threshold") {
  ObjectModel model = zoo_object("tetra", 300);
  RigidPose truth;
  Scene scene = truth_scene({truth}, {1.0});
  double threshold = 0.1 * model.diameter;

  RigidPose inside = truth;
  inside.translation += Vec3{0.99 * threshold, 0, 0};
  RigidPose outside = truth;
  outside.translation += Vec3{1.01 * threshold, 0, 0};
  auto in_match = match_estimates({make_estimate(inside, 1.0)}, scene, model, 0.1, 0.5);
  auto out_match =
      match_estimates({make_estimate(outside, 1.0)}, scene, model, 0.1, 0.5);
  CHECK(in_match[0].outcome == MatchOutcome::tp);
  CHECK(out_match[0].outcome == MatchOutcome::fp);
}

TEST_CASE("estimate closer to an ineligible truth is ignored, not matched") {
  ObjectModel model = zoo_object("tetra", 300);
  RigidPose eligible;
  RigidPose ineligible;
  ineligible.translation = Vec3{0.05 * model.diameter, 0, 0};
  Scene scene = truth_scene({eligible, ineligible}, {1.0, 0.0});

  // estimate sits on the ineligible pose; the eligible one is within
  // threshold but farther away
  auto matches = match_estimates({make_estimate(ineligible, 1.0)}, scene, model,
                                 0.1, 0.5);
  CHECK(matches[0].outcome == MatchOutcome::ignored);
}

TEST_CASE("pr_curve computes the step-interpolated area") {
  auto tp = [](double conf) {
    MatchedEstimate m;
    m.confidence = conf;
    m.outcome = MatchOutcome::tp;
    return m;
  };
  auto fp = [](double conf) {
    MatchedEstimate m;
    m.confidence = conf;
    m.outcome = MatchOutcome::fp;
    return m;
  };
  auto ig = [](double conf) {
    MatchedEstimate m;
    m.confidence = conf;
    m.outcome = MatchOutcome::ignored;
    return m;
  };

  // one exact hit above one false alarm: full AP
  PRCurve perfect = pr_curve({tp(1.0), fp(0.5)}, 1);
  CHECK(perfect.ap == doctest::Approx(1.0));
  REQUIRE(perfect.recall.size() == 2);
  CHECK(perfect.recall[0] == doctest::Approx(1.0));
  CHECK(perfect.precision[1] == doctest::Approx(0.5));

  // false alarm ranked above the hit halves the AP
  PRCurve half = pr_curve({tp(0.5), fp(1.0)}, 1);
  CHECK(half.ap == doctest::Approx(0.5));

  // ignored entries contribute nothing anywhere
  PRCurve ignored = pr_curve({tp(1.0), ig(0.9), fp(0.5), ig(0.1)}, 1);
  CHECK(ignored.ap == doctest::Approx(1.0));
  CHECK(ignored.recall.size() == 2);

  // a missing truth caps recall
  PRCurve capped = pr_curve({tp(1.0)}, 2);
  CHECK(capped.ap == doctest::Approx(0.5));

  CHECK(pr_curve({}, 3).ap == 0.0);
  CHECK(pr_curve({fp(1.0)}, 0).ap == 0.0);
}

TEST_CASE("visibility_loss is the mean absolute error") {
  Scene scene;
  scene.poses = {RigidPose{}, RigidPose{}};
  scene.visibility = {1.0, 0.5};
  scene.cloud.push_back({0, 0, 0});
  scene.cloud.push_back({1, 0, 0});
  scene.cloud.push_back({2, 0, 0});
  scene.cloud.instance_ids = std::vector<std::int32_t>{0, 0, 1};

  PredictionField field;
  field.n_points = 3;
  field.n_k = 0;
  field.visibility = {0.9, 1.0, 0.25};
  CHECK(visibility_loss(field, scene) ==
        doctest::Approx((0.1 + 0.0 + 0.25) / 3.0).epsilon(1e-12));

  field.visibility = {0.9, 1.0};
  field.n_points = 2;
  CHECK_THROWS_AS(visibility_loss(field, scene), std::invalid_argument);
}

TEST_CASE("keypoint_loss accepts equivalent targets only when enabled") {
  ObjectModel model = zoo_object("hexprism", 400);
  KeypointSet keypoints = make_keypoints(model, 2);
  REQUIRE(keypoints.equivalents[2].size() == 6);

  Scene scene;
  scene.poses = {RigidPose{}};
  scene.visibility = {1.0};
  scene.cloud.push_back({0, 0, 0});
  scene.cloud.instance_ids = std::vector<std::int32_t>{0};

  PredictionField field;
  field.n_points = 1;
  field.n_k = keypoints.n_k();
  field.visibility = {1.0};
  field.keypoints.resize(field.n_k);
  for (std::size_t j = 0; j < field.n_k; ++j)
    field.keypoint(0, j) = keypoints.keypoints[j];
  // swap the in-plane prediction for one of its non-canonical equivalents
  field.keypoint(0, 2) = keypoints.equivalents[2][3];

  CHECK(keypoint_loss(field, scene, keypoints, true) < 1e-9);
  double strict = keypoint_loss(field, scene, keypoints, false);
  CHECK(strict ==
        doctest::Approx(distance(keypoints.keypoints[2], keypoints.equivalents[2][3]))
            .epsilon(1e-9));
}

TEST_CASE("keypoint_loss sums per-type errors for each point") {
  ObjectModel model = zoo_object("tetra", 300);
  KeypointSet keypoints = make_keypoints(model, 2);

  Scene scene;
  scene.poses = {RigidPose{}};
  scene.visibility = {1.0};
  scene.cloud.push_back({0, 0, 0});
  scene.cloud.instance_ids = std::vector<std::int32_t>{0};

  PredictionField field;
  field.n_points = 1;
  field.n_k = keypoints.n_k();
  field.visibility = {1.0};
  field.keypoints.resize(field.n_k);
  for (std::size_t j = 0; j < field.n_k; ++j)
    field.keypoint(0, j) = keypoints.keypoints[j];
  field.keypoint(0, 0) += Vec3{0.3, 0, 0};
  field.keypoint(0, 1) += Vec3{0, 0.4, 0};
  CHECK(keypoint_loss(field, scene, keypoints, true) ==
        doctest::Approx(0.7).epsilon(1e-9));
}
