#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"

#include "binpose/bounding.hpp"
#include "binpose/geometry.hpp"
#include "binpose/point_cloud.hpp"

using namespace binpose;

TEST_CASE("axis_angle rotations behave like Rodrigues") {
  Rot3 r = Rot3::axis_angle(Vec3{0, 0, 1}, M_PI / 2);
  Vec3 v = r.apply(Vec3{1, 0, 0});
  CHECK(v.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.is_rotation(1e-12));
  CHECK(r.det() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("between maps one direction onto another, antiparallel included") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 50; ++i) {
    Vec3 a = Vec3{gauss(rng), gauss(rng), gauss(rng)}.normalized();
    Vec3 b = Vec3{gauss(rng), gauss(rng), gauss(rng)}.normalized();
    Rot3 r = Rot3::between(a, b);
    CHECK(r.is_rotation(1e-9));
    CHECK(distance(r.apply(a), b) < 1e-9);
  }
  Rot3 flip = Rot3::between(Vec3{0, 0, 1}, Vec3{0, 0, -1});
  CHECK(flip.is_rotation(1e-9));
  CHECK(distance(flip.apply(Vec3{0, 0, 1}), Vec3{0, 0, -1}) < 1e-9);
}

TEST_CASE("compose applies the second pose first") {
  RigidPose a{Rot3::axis_angle(Vec3{0, 0, 1}, M_PI / 2), Vec3{1, 0, 0}};
  RigidPose b{Rot3::identity(), Vec3{0, 1, 0}};
  RigidPose ab = compose(a, b);
  Vec3 p{0, 0, 0};
  CHECK(distance(ab.apply(p), a.apply(b.apply(p))) < 1e-15);
}

TEST_CASE("pose inverse round-trips") {
  RigidPose p{Rot3::axis_angle(Vec3{1, 2, 2}.normalized(), 0.8), Vec3{0.3, -0.1, 0.5}};
  RigidPose inv = p.inverse();
  Vec3 v{0.2, 0.7, -0.4};
  CHECK(distance(inv.apply(p.apply(v)), v) < 1e-12);
}

TEST_CASE("bounding box is tight") {
  PointCloud cloud;
  cloud.push_back({-1, 2, 0});
  cloud.push_back({3, -2, 5});
  cloud.push_back({0, 0, 1});
  AxisAlignedBox box = bounding_box(cloud);
  CHECK(box.min_corner.x == -1);
  CHECK(box.min_corner.y == -2);
  CHECK(box.min_corner.z == 0);
  CHECK(box.max_corner.x == 3);
  CHECK(box.max_corner.y == 2);
  CHECK(box.max_corner.z == 5);
  CHECK_THROWS_AS(bounding_box(PointCloud{}), std::invalid_argument);
}

TEST_CASE("min bounding sphere of the unit cube corners") {
  PointCloud cloud;
  for (int i = 0; i < 8; ++i) {
    cloud.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  }
  Sphere s = min_bounding_sphere(cloud);
  CHECK(s.radius == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
  CHECK(distance(s.center, Vec3{0.5, 0.5, 0.5}) < 1e-9);
  CHECK(min_bounding_sphere_diameter(cloud) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("min bounding sphere handles degenerate inputs") {
  PointCloud one;
  one.push_back({2, 3, 4});
  Sphere s1 = min_bounding_sphere(one);
  CHECK(s1.radius == 0.0);
  CHECK(distance(s1.center, Vec3{2, 3, 4}) == 0.0);

  PointCloud two;
  two.push_back({0, 0, 0});
  two.push_back({2, 0, 0});
  Sphere s2 = min_bounding_sphere(two);
  CHECK(s2.radius == doctest::Approx(1.0).epsilon(1e-12));

  PointCloud collinear;
  for (int i = 0; i <= 10; ++i) collinear.push_back({double(i), 0, 0});
  Sphere s3 = min_bounding_sphere(collinear);
  CHECK(s3.radius == doctest::Approx(5.0).epsilon(1e-9));
}

namespace {

// Exact reference: the smallest sphere is determined by some support set of
// at most 4 points, so enumerate candidate spheres from every subset of size
// 1..4 and keep the smallest one covering everything.
double brute_min_radius(const std::vector<Vec3>& pts) {
  auto covers = [&](const Vec3& c, double r) {
    for (const Vec3& p : pts)
      if (distance(p, c) > r + 1e-9) return false;
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (covers(pts[i], 0.0)) best = std::min(best, 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      Vec3 c = (pts[i] + pts[j]) * 0.5;
      double r = distance(pts[i], pts[j]) * 0.5;
      if (r < best && covers(c, r)) best = r;
      for (std::size_t k = j + 1; k < n; ++k) {
        // circumcenter of three points in their plane
        Vec3 ab = pts[j] - pts[i], ac = pts[k] - pts[i];
        Vec3 nrm = ab.cross(ac);
        double nn = nrm.squared_norm();
        if (nn > 1e-18) {
          Vec3 rel = (ac.cross(nrm) * ab.squared_norm() +
                      nrm.cross(ab) * ac.squared_norm()) /
                     (2.0 * nn);
          Vec3 c3 = pts[i] + rel;
          double r3 = distance(c3, pts[i]);
          if (r3 < best && covers(c3, r3)) best = r3;
        }
        for (std::size_t l = k + 1; l < n; ++l) {
          // circumcenter of four points: solve 2(p_m - p_i) . c = |p_m|^2-|p_i|^2
          Vec3 b1 = pts[j] - pts[i], b2 = pts[k] - pts[i], b3 = pts[l] - pts[i];
          double det = b1.dot(b2.cross(b3));
          if (std::abs(det) < 1e-15) continue;
          double d1 = 0.5 * (pts[j].squared_norm() - pts[i].squared_norm());
          double d2 = 0.5 * (pts[k].squared_norm() - pts[i].squared_norm());
          double d3 = 0.5 * (pts[l].squared_norm() - pts[i].squared_norm());
          Vec3 u = b2.cross(b3), v = b3.cross(b1), w = b1.cross(b2);
          Vec3 c4 = (u * d1 + v * d2 + w * d3) / det;
          double r4 = distance(c4, pts[i]);
          if (r4 < best && covers(c4, r4)) best = r4;
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("min bounding sphere matches subset enumeration on random sets") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 3 + rng() % 10;
    std::vector<Vec3> pts;
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 p{dist(rng), dist(rng), dist(rng)};
      pts.push_back(p);
      cloud.push_back(p);
    }
    Sphere s = min_bounding_sphere(cloud);
    for (const Vec3& p : pts) CHECK(distance(p, s.center) <= s.radius + 1e-9);
    CHECK(s.radius == doctest::Approx(brute_min_radius(pts)).epsilon(1e-7));
  }
}

TEST_CASE("squared_norm of Vec3 squared_distance helpers") {
  CHECK(squared_distance(Vec3{1, 2, 3}, Vec3{1, 2, 4}) == 1.0);
  CHECK(distance(Vec3{0, 3, 0}, Vec3{4, 0, 0}) == 5.0);
}

TEST_CASE("apply_pose maps channels through unchanged") {
  PointCloud cloud;
  cloud.push_back({1, 0, 0});
  cloud.push_back({0, 1, 0});
  cloud.instance_ids = std::vector<std::int32_t>{4, 5};
  RigidPose pose{Rot3::axis_angle(Vec3{0, 0, 1}, M_PI), Vec3{1, 1, 1}};
  PointCloud moved = apply_pose(pose, cloud);
  CHECK(distance(moved.point(0), Vec3{0, 1, 1}) < 1e-12);
  CHECK(distance(moved.point(1), Vec3{1, 0, 1}) < 1e-12);
  REQUIRE(moved.instance_ids.has_value());
  CHECK((*moved.instance_ids)[1] == 5);
}
