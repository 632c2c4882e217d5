#include "binpose/bounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "binpose/kernels.hpp"

namespace binpose {

AxisAlignedBox bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw std::invalid_argument("bounding box of empty cloud");
  double mn[3], mx[3];
  kernels::ops().minmax3(cloud.x.data(), cloud.y.data(), cloud.z.data(), cloud.size(),
                         mn, mx);
  return {{mn[0], mn[1], mn[2]}, {mx[0], mx[1], mx[2]}};
}

namespace {

constexpr double kEps = 1e-12;

// Smallest sphere through 2..4 support points. Degenerate supports
// (collinear, coplanar) fall back to smaller subsets, so the result is the
// smallest sphere with the given points on or inside its boundary.
Sphere sphere_from2(const Vec3& a, const Vec3& b) {
  Vec3 c = (a + b) * 0.5;
  return {c, distance(a, c)};
}

bool circumsphere3(const Vec3& a, const Vec3& b, const Vec3& c, Sphere* out) {
  Vec3 ab = b - a, ac = c - a;
  Vec3 n = ab.cross(ac);
  double nn = n.squared_norm();
  if (nn <= kEps * ab.squared_norm() * ac.squared_norm()) return false;
  Vec3 rel = (ac.squared_norm() * ab.squared_norm() * ac -
              ab.squared_norm() * ac.squared_norm() * ab);
  // Classic circumcenter expression: a + ((|ac|^2 (n x ab)) + (|ab|^2 (ac x n))) / (2 |n|^2)
  Vec3 center = a + (n.cross(ab) * ac.squared_norm() + ac.cross(n) * ab.squared_norm()) /
                        (2.0 * nn);
  (void)rel;
  *out = {center, distance(center, a)};
  return true;
}

bool circumsphere4(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                   Sphere* out) {
  // Solve 2 (p_i - a) . x = |p_i|^2 - |a|^2 for i in {b, c, d}.
  Vec3 r1 = b - a, r2 = c - a, r3 = d - a;
  double det = r1.dot(r2.cross(r3));
  double scale = std::max({r1.squared_norm(), r2.squared_norm(), r3.squared_norm()});
  if (std::abs(det) <= kEps * scale * std::sqrt(scale)) return false;
  double k1 = 0.5 * (b.squared_norm() - a.squared_norm());
  double k2 = 0.5 * (c.squared_norm() - a.squared_norm());
  double k3 = 0.5 * (d.squared_norm() - a.squared_norm());
  Vec3 cx = r2.cross(r3), cy = r3.cross(r1), cz = r1.cross(r2);
  Vec3 center = (cx * k1 + cy * k2 + cz * k3) / det;
  *out = {center, distance(center, a)};
  return true;
}

bool contains(const Sphere& s, const Vec3& p, double slack) {
  return squared_distance(s.center, p) <= s.radius * s.radius + slack;
}

/// Smallest sphere with every support point on its boundary (or the smallest
/// enclosing sphere of the supports when they are degenerate).
Sphere sphere_of_supports(const std::vector<Vec3>& sup) {
  switch (sup.size()) {
    case 0:
      return {{0, 0, 0}, -1.0};
    case 1:
      return {sup[0], 0.0};
    case 2:
      return sphere_from2(sup[0], sup[1]);
    default:
      break;
  }
  // Try the exact circumsphere of all supports, then fall back to smaller
  // subsets that still enclose the rest. Tolerant containment keeps the
  // recursion stable for near-degenerate supports.
  Sphere best{{0, 0, 0}, HUGE_VAL};
  bool found = false;
  auto consider = [&](const Sphere& s) {
    double slack = 1e-10 * (1.0 + s.radius * s.radius);
    for (const Vec3& p : sup)
      if (!contains(s, p, slack)) return;
    if (!found || s.radius < best.radius) {
      best = s;
      found = true;
    }
  };
  const std::size_t n = sup.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) consider(sphere_from2(sup[i], sup[j]));
  Sphere s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (circumsphere3(sup[i], sup[j], sup[k], &s)) consider(s);
  if (n == 4 && circumsphere4(sup[0], sup[1], sup[2], sup[3], &s)) consider(s);
  if (!found) {
    // All supports numerically coincident.
    return {sup[0], 0.0};
  }
  return best;
}

Sphere welzl(std::vector<Vec3>& pts, std::size_t n, std::vector<Vec3>& sup) {
  if (n == 0 || sup.size() == 4) return sphere_of_supports(sup);
  Sphere s = welzl(pts, n - 1, sup);
  const Vec3& p = pts[n - 1];
  if (s.radius >= 0.0 && contains(s, p, 1e-10 * (1.0 + s.radius * s.radius)))
    return s;
  sup.push_back(p);
  s = welzl(pts, n - 1, sup);
  sup.pop_back();
  // Move to front keeps the expected recursion depth small.
  std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n - 1),
              pts.begin() + static_cast<std::ptrdiff_t>(n));
  return s;
}

}  // namespace

Sphere min_bounding_sphere(const PointCloud& cloud) {
  if (cloud.empty()) throw std::invalid_argument("bounding sphere of empty cloud");
  std::vector<Vec3> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) pts[i] = cloud.point(i);
  std::shuffle(pts.begin(), pts.end(), std::mt19937_64{0x9e3779b97f4a7c15ULL});
  std::vector<Vec3> sup;
  sup.reserve(4);
  Sphere s = welzl(pts, pts.size(), sup);
  if (s.radius < 0.0) s = {pts[0], 0.0};
  return s;
}

}  // namespace binpose
