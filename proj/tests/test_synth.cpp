#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "binpose/rng.hpp"
#include "binpose/synth.hpp"

using namespace binpose;

namespace {

const AxisAlignedBox kBin{{-0.25, -0.25, 0.0}, {0.25, 0.25, 0.2}};

bool clouds_identical(const PointCloud& a, const PointCloud& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z &&
         a.instance_ids == b.instance_ids && a.visibility == b.visibility;
}

}  // namespace

TEST_CASE("zoo objects are canonical and distinct") {
  std::vector<std::string> names = zoo_names();
  CHECK(names.size() == 5);
  std::set<std::string> seen;
  for (const std::string& name : names) {
    ObjectModel model = zoo_object(name);
    CHECK(model.id == name);
    CHECK(seen.insert(name).second);
    CHECK(model.model.size() == 500);
    CHECK(model.diameter > 0.0);
    CHECK(model.model.centroid().norm() < 1e-9);
    CHECK_NOTHROW(model.symmetry.validate());
    CHECK(!model.eval_subsample.empty());
  }
  CHECK_THROWS_AS(zoo_object("nonexistent"), std::invalid_argument);
}

TEST_CASE("zoo covers every symmetry class") {
  CHECK(zoo_object("cylinder").symmetry.symmetry_class == SymmetryClass::revolution);
  CHECK(zoo_object("hexprism").symmetry.symmetry_class == SymmetryClass::finite);
  CHECK(zoo_object("brick").symmetry.symmetry_class == SymmetryClass::finite);
  CHECK(zoo_object("bracket").symmetry.symmetry_class == SymmetryClass::mirror);
  CHECK(zoo_object("tetra").symmetry.symmetry_class == SymmetryClass::no_proper);
  CHECK(zoo_object("hexprism").symmetry.group.size() == 6);
  CHECK(zoo_object("brick").symmetry.group.size() == 4);
}

TEST_CASE("repeated zoo calls build identical models") {
  ObjectModel a = zoo_object("tetra");
  ObjectModel b = zoo_object("tetra");
  CHECK(clouds_identical(a.model, b.model));
  CHECK(a.diameter == b.diameter);
}

TEST_CASE("random_rotation produces proper rotations") {
  Rng rng = make_rng(4);
  for (int i = 0; i < 100; ++i) {
    Rot3 r = random_rotation(rng);
    CHECK(r.is_rotation(1e-9));
  }
}

TEST_CASE("synth_scene is deterministic per seed") {
  ObjectModel model = zoo_object("brick", 300);
  Scene a = synth_scene(model, 5, kBin, 77);
  Scene b = synth_scene(model, 5, kBin, 77);
  Scene c = synth_scene(model, 5, kBin, 78);
  CHECK(clouds_identical(a.cloud, b.cloud));
  CHECK(a.visibility == b.visibility);
  CHECK_FALSE(clouds_identical(a.cloud, c.cloud));
}

TEST_CASE("synth_scene places instances apart and inside the bin") {
  ObjectModel model = zoo_object("tetra", 300);
  Scene scene = synth_scene(model, 6, kBin, 21);
  REQUIRE(scene.poses.size() == 6);
  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    CHECK(scene.poses[i].rotation.is_rotation(1e-9));
    CHECK(kBin.contains(scene.poses[i].translation, 1e-9));
    for (std::size_t j = i + 1; j < scene.poses.size(); ++j)
      CHECK(distance(scene.poses[i].translation, scene.poses[j].translation) >=
            0.5 * model.diameter);
  }
}

TEST_CASE("synth_scene visibility is the occlusion survival ratio") {
  ObjectModel model = zoo_object("brick", 400);
  Scene scene = synth_scene(model, 6, kBin, 31);
  REQUIRE(scene.cloud.instance_ids.has_value());
  REQUIRE(scene.visibility.size() == 6);

  std::vector<std::size_t> counts(6, 0);
  for (std::int32_t id : *scene.cloud.instance_ids) {
    REQUIRE(id >= 0);
    REQUIRE(id < 6);
    ++counts[std::size_t(id)];
  }
  std::size_t n_max = *std::max_element(counts.begin(), counts.end());
  REQUIRE(n_max > 0);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(scene.visibility[i] == doctest::Approx(double(counts[i]) / double(n_max)));
  CHECK(*std::max_element(scene.visibility.begin(), scene.visibility.end()) == 1.0);

  // per-point visibility channel mirrors the instance value
  REQUIRE(scene.cloud.visibility.has_value());
  for (std::size_t p = 0; p < scene.cloud.size(); ++p) {
    std::int32_t id = (*scene.cloud.instance_ids)[p];
    CHECK((*scene.cloud.visibility)[p] == scene.visibility[std::size_t(id)]);
  }
}

TEST_CASE("occlusion keeps at most one point per depth grid cell") {
  ObjectModel model = zoo_object("brick", 500);
  SynthParams params;
  params.grid_resolution = 16;  // coarse grid forces heavy occlusion
  Scene scene = synth_scene(model, 4, kBin, 41, params);
  CHECK(scene.cloud.size() <= 16 * 16);
  Scene fine = synth_scene(model, 4, kBin, 41);
  CHECK(fine.cloud.size() > scene.cloud.size());
}

TEST_CASE("overfull bin throws") {
  ObjectModel model = zoo_object("brick", 200);
  AxisAlignedBox tiny{{-0.03, -0.03, 0.0}, {0.03, 0.03, 0.03}};
  CHECK_THROWS_WITH_AS(synth_scene(model, 50, tiny, 3), "bin overfull",
                       std::runtime_error);
}

TEST_CASE("oracle predictor with zero noise emits exact keypoints and visibility") {
  ObjectModel model = zoo_object("tetra", 300);
  KeypointSet keypoints = make_keypoints(model, 2);
  Scene scene = synth_scene(model, 4, kBin, 51);
  PredictionField field = oracle_predictor(scene, keypoints, model, NoiseModel{}, 9);
  field.validate();
  REQUIRE(field.n_points == scene.cloud.size());
  REQUIRE(field.n_k == keypoints.n_k());
  for (std::size_t p = 0; p < field.n_points; ++p) {
    std::int32_t id = (*scene.cloud.instance_ids)[p];
    const RigidPose& pose = scene.poses[std::size_t(id)];
    for (std::size_t j = 0; j < field.n_k; ++j) {
      Vec3 want = pose.apply(keypoints.keypoints[j]);
      CHECK(distance(field.keypoint(p, j), want) < 1e-9);
    }
    CHECK(field.visibility[p] ==
          doctest::Approx(scene.visibility[std::size_t(id)]));
  }
}

TEST_CASE("oracle keypoint noise has the configured scale") {
  ObjectModel model = zoo_object("tetra", 500);
  KeypointSet keypoints = make_keypoints(model, 2);
  AxisAlignedBox bigbin{{-0.4, -0.4, 0.0}, {0.4, 0.4, 0.25}};
  Scene scene = synth_scene(model, 10, bigbin, 61);
  NoiseModel noise;
  noise.sigma = 0.02;
  PredictionField field = oracle_predictor(scene, keypoints, model, noise, 13);

  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < field.n_points; ++p) {
    std::int32_t id = (*scene.cloud.instance_ids)[p];
    const RigidPose& pose = scene.poses[std::size_t(id)];
    for (std::size_t j = 0; j < field.n_k; ++j) {
      sum += distance(field.keypoint(p, j), pose.apply(keypoints.keypoints[j]));
      ++n;
    }
  }
  // mean norm of an isotropic Gaussian in 3D is sigma*sqrt(8/pi)
  double want = noise.sigma * model.diameter * std::sqrt(8.0 / M_PI);
  CHECK(sum / double(n) == doctest::Approx(want).epsilon(0.1));
}

TEST_CASE("oracle ambiguity targets only equivalent positions") {
  ObjectModel model = zoo_object("hexprism", 400);
  KeypointSet keypoints = make_keypoints(model, 2);
  Scene scene = synth_scene(model, 4, kBin, 71);
  NoiseModel noise;
  noise.p_amb = 1.0;
  PredictionField field = oracle_predictor(scene, keypoints, model, noise, 15);

  std::size_t off_canonical = 0;
  for (std::size_t p = 0; p < field.n_points; ++p) {
    std::int32_t id = (*scene.cloud.instance_ids)[p];
    const RigidPose& pose = scene.poses[std::size_t(id)];
    for (std::size_t j = 0; j < field.n_k; ++j) {
      double best = 1e9;
      for (const Vec3& eq : keypoints.equivalents[j])
        best = std::min(best, distance(field.keypoint(p, j), pose.apply(eq)));
      CHECK(best < 1e-9);
      if (distance(field.keypoint(p, j), pose.apply(keypoints.keypoints[j])) > 1e-9)
        ++off_canonical;
    }
  }
  CHECK(off_canonical > 0);
}

TEST_CASE("oracle outlier rate matches p_out") {
  ObjectModel model = zoo_object("brick", 500);
  KeypointSet keypoints = make_keypoints(model, 2);
  AxisAlignedBox bigbin{{-0.4, -0.4, 0.0}, {0.4, 0.4, 0.25}};
  Scene scene = synth_scene(model, 10, bigbin, 81);
  NoiseModel noise;
  noise.p_out = 0.3;
  PredictionField field = oracle_predictor(scene, keypoints, model, noise, 19);

  std::size_t outliers = 0, total = 0;
  for (std::size_t p = 0; p < field.n_points; ++p) {
    std::int32_t id = (*scene.cloud.instance_ids)[p];
    const RigidPose& pose = scene.poses[std::size_t(id)];
    for (std::size_t j = 0; j < field.n_k; ++j) {
      ++total;
      double best = 1e9;
      for (const Vec3& eq : keypoints.equivalents[j])
        best = std::min(best, distance(field.keypoint(p, j), pose.apply(eq)));
      if (best > 1e-9) ++outliers;
    }
  }
  CHECK(double(outliers) / double(total) == doctest::Approx(0.3).epsilon(0.15));
}

TEST_CASE("domain_shift drops points at the configured rate and keeps poses") {
  ObjectModel model = zoo_object("brick", 500);
  AxisAlignedBox bigbin{{-0.4, -0.4, 0.0}, {0.4, 0.4, 0.25}};
  Scene scene = synth_scene(model, 8, bigbin, 85);
  ShiftParams params;
  params.dropout = 0.4;
  Scene shifted = domain_shift(scene, params, 23);

  CHECK(shifted.poses.size() == scene.poses.size());
  for (std::size_t i = 0; i < scene.poses.size(); ++i)
    CHECK(shifted.poses[i].rotation.max_abs_diff(scene.poses[i].rotation) == 0.0);
  double kept = double(shifted.cloud.size()) / double(scene.cloud.size());
  CHECK(kept == doctest::Approx(0.6).epsilon(0.1));

  // visibility is recomputed from surviving counts
  std::vector<std::size_t> counts(scene.poses.size(), 0);
  for (std::int32_t id : *shifted.cloud.instance_ids) ++counts[std::size_t(id)];
  std::size_t n_max = *std::max_element(counts.begin(), counts.end());
  for (std::size_t i = 0; i < counts.size(); ++i)
    CHECK(shifted.visibility[i] == doctest::Approx(double(counts[i]) / double(n_max)));
}

TEST_CASE("domain_shift z noise perturbs only z") {
  ObjectModel model = zoo_object("brick", 400);
  Scene scene = synth_scene(model, 4, kBin, 87);
  ShiftParams params;
  params.z_noise = 0.002;
  Scene shifted = domain_shift(scene, params, 29);
  REQUIRE(shifted.cloud.size() == scene.cloud.size());
  double dz = 0.0;
  for (std::size_t p = 0; p < scene.cloud.size(); ++p) {
    CHECK(shifted.cloud.x[p] == scene.cloud.x[p]);
    CHECK(shifted.cloud.y[p] == scene.cloud.y[p]);
    dz += std::abs(shifted.cloud.z[p] - scene.cloud.z[p]);
  }
  // mean |N(0, s)| = s*sqrt(2/pi)
  CHECK(dz / double(scene.cloud.size()) ==
        doctest::Approx(0.002 * std::sqrt(2.0 / M_PI)).epsilon(0.15));
}

TEST_CASE("domain_shift resample bias removes more points at high x") {
  ObjectModel model = zoo_object("brick", 500);
  AxisAlignedBox bigbin{{-0.4, -0.4, 0.0}, {0.4, 0.4, 0.25}};
  Scene scene = synth_scene(model, 8, bigbin, 89);
  ShiftParams params;
  params.resample_bias = 0.8;
  Scene shifted = domain_shift(scene, params, 33);

  auto kept_fraction = [&](const Scene& s, bool high_x) {
    double mid = 0.5 * (s.bin.min_corner.x + s.bin.max_corner.x);
    std::size_t total = 0;
    for (std::size_t p = 0; p < scene.cloud.size(); ++p)
      if ((scene.cloud.x[p] > mid) == high_x) ++total;
    std::size_t kept = 0;
    for (std::size_t p = 0; p < s.cloud.size(); ++p)
      if ((s.cloud.x[p] > mid) == high_x) ++kept;
    return double(kept) / double(total);
  };
  CHECK(kept_fraction(shifted, true) < kept_fraction(shifted, false) - 0.1);
}

TEST_CASE("domain_shift is deterministic per seed") {
  ObjectModel model = zoo_object("brick", 300);
  Scene scene = synth_scene(model, 4, kBin, 93);
  ShiftParams params;
  params.dropout = 0.3;
  params.z_noise = 0.001;
  Scene a = domain_shift(scene, params, 1);
  Scene b = domain_shift(scene, params, 1);
  Scene c = domain_shift(scene, params, 2);
  CHECK(clouds_identical(a.cloud, b.cloud));
  CHECK_FALSE(clouds_identical(a.cloud, c.cloud));
}
