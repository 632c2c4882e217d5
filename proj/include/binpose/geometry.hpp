#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace binpose {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double squared_norm() const { return dot(*this); }
  Vec3 normalized() const {
    double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return *this / n;
  }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }
inline constexpr double squared_distance(const Vec3& a, const Vec3& b) {
  return (a - b).squared_norm();
}

/// 3x3 rotation matrix, row major. Constructible from arbitrary entries
/// so it can hold intermediate products; is_rotation() checks the
/// orthonormal / det(+1) contract.
struct Rot3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Rot3 identity() { return {}; }

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }
  double& operator()(int r, int c) { return m[static_cast<std::size_t>(r * 3 + c)]; }

  Vec3 apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Vec3 operator*(const Vec3& v) const { return apply(v); }

  Rot3 operator*(const Rot3& o) const {
    Rot3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Rot3 transposed() const {
    Rot3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  /// Max absolute deviation of R^T R from the identity.
  double orthonormality_error() const {
    Rot3 g = transposed() * (*this);
    double e = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        e = std::max(e, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return e;
  }

  bool is_rotation(double tol = 1e-9) const {
    return orthonormality_error() <= tol && std::abs(det() - 1.0) <= tol;
  }

  /// Rodrigues formula. `axis` need not be unit length.
  static Rot3 axis_angle(const Vec3& axis, double angle) {
    Vec3 u = axis.normalized();
    double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    Rot3 r;
    r(0, 0) = c + u.x * u.x * t;
    r(0, 1) = u.x * u.y * t - u.z * s;
    r(0, 2) = u.x * u.z * t + u.y * s;
    r(1, 0) = u.y * u.x * t + u.z * s;
    r(1, 1) = c + u.y * u.y * t;
    r(1, 2) = u.y * u.z * t - u.x * s;
    r(2, 0) = u.z * u.x * t - u.y * s;
    r(2, 1) = u.z * u.y * t + u.x * s;
    r(2, 2) = c + u.z * u.z * t;
    return r;
  }

  /// Minimal rotation taking unit vector `from` to unit vector `to`.
  /// For antiparallel inputs picks a deterministic perpendicular axis.
  static Rot3 between(const Vec3& from, const Vec3& to);

  double max_abs_diff(const Rot3& o) const {
    double e = 0.0;
    for (std::size_t i = 0; i < 9; ++i) e = std::max(e, std::abs(m[i] - o.m[i]));
    return e;
  }
};

struct RigidPose {
  Rot3 rotation;
  Vec3 translation;

  static RigidPose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation.apply(p) + translation; }

  RigidPose inverse() const {
    Rot3 rt = rotation.transposed();
    return {rt, -(rt.apply(translation))};
  }
};

/// Applies b first, then a.
inline RigidPose compose(const RigidPose& a, const RigidPose& b) {
  return {a.rotation * b.rotation, a.rotation.apply(b.translation) + a.translation};
}

struct AxisAlignedBox {
  Vec3 min_corner;
  Vec3 max_corner;

  Vec3 extent() const { return max_corner - min_corner; }
  Vec3 center() const { return (min_corner + max_corner) * 0.5; }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return p.x >= min_corner.x - tol && p.x <= max_corner.x + tol &&
           p.y >= min_corner.y - tol && p.y <= max_corner.y + tol &&
           p.z >= min_corner.z - tol && p.z <= max_corner.z + tol;
  }
  bool valid() const {
    return min_corner.x <= max_corner.x && min_corner.y <= max_corner.y &&
           min_corner.z <= max_corner.z;
  }
};

inline Rot3 Rot3::between(const Vec3& from, const Vec3& to) {
  double c = from.dot(to);
  Vec3 ax = from.cross(to);
  double s = ax.norm();
  if (s < 1e-12) {
    if (c > 0.0) return Rot3::identity();
    // 180 degrees: rotate about any axis perpendicular to `from`.
    Vec3 ref = std::abs(from.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 perp = from.cross(ref).normalized();
    return axis_angle(perp, M_PI);
  }
  return axis_angle(ax, std::atan2(s, c));
}

}  // namespace binpose
