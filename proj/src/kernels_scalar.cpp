// Scalar reference kernels. Compiled with fp-contract off so the AVX2 variants
// can match them bit for bit where the contract promises it.

#include <algorithm>
#include <cmath>

#include "binpose/kernels.hpp"

namespace binpose::kernels {
namespace {

void transform_points_scalar(const double* xs, const double* ys, const double* zs,
                             std::size_t n, const double* r, const double* t,
                             double* ox, double* oy, double* oz) {
  for (std::size_t i = 0; i < n; ++i) {
    double x = xs[i], y = ys[i], z = zs[i];
    ox[i] = ((r[0] * x + r[1] * y) + r[2] * z) + t[0];
    oy[i] = ((r[3] * x + r[4] * y) + r[5] * z) + t[1];
    oz[i] = ((r[6] * x + r[7] * y) + r[8] * z) + t[2];
  }
}

inline double dist_sq(double px, double py, double pz, double qx, double qy,
                      double qz) {
  double dx = px - qx, dy = py - qy, dz = pz - qz;
  return (dx * dx + dy * dy) + dz * dz;
}

std::size_t nearest_point_scalar(const double* xs, const double* ys, const double* zs,
                                 std::size_t n, double qx, double qy, double qz,
                                 double* best_d2) {
  std::size_t best = 0;
  double bd = dist_sq(xs[0], ys[0], zs[0], qx, qy, qz);
  for (std::size_t i = 1; i < n; ++i) {
    double d = dist_sq(xs[i], ys[i], zs[i], qx, qy, qz);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  *best_d2 = bd;
  return best;
}

void collect_within_scalar(const double* xs, const double* ys, const double* zs,
                           std::size_t n, double qx, double qy, double qz, double r2,
                           std::uint32_t base, std::vector<std::uint32_t>& out) {
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_sq(xs[i], ys[i], zs[i], qx, qy, qz) <= r2)
      out.push_back(base + static_cast<std::uint32_t>(i));
  }
}

void count_sum_within_scalar(const double* xs, const double* ys, const double* zs,
                             std::size_t n, double qx, double qy, double qz,
                             double r2, std::size_t* count, double* sum_x,
                             double* sum_y, double* sum_z) {
  std::size_t c = 0;
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_sq(xs[i], ys[i], zs[i], qx, qy, qz) <= r2) {
      ++c;
      sx += xs[i];
      sy += ys[i];
      sz += zs[i];
    }
  }
  *count = c;
  *sum_x = sx;
  *sum_y = sy;
  *sum_z = sz;
}

double sum_dist_to_point_scalar(const double* xs, const double* ys, const double* zs,
                                std::size_t n, double cx, double cy, double cz) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += std::sqrt(dist_sq(xs[i], ys[i], zs[i], cx, cy, cz));
  return s;
}

void minmax3_scalar(const double* xs, const double* ys, const double* zs,
                    std::size_t n, double* mn, double* mx) {
  mn[0] = mx[0] = xs[0];
  mn[1] = mx[1] = ys[0];
  mn[2] = mx[2] = zs[0];
  for (std::size_t i = 1; i < n; ++i) {
    mn[0] = std::min(mn[0], xs[i]);
    mx[0] = std::max(mx[0], xs[i]);
    mn[1] = std::min(mn[1], ys[i]);
    mx[1] = std::max(mx[1], ys[i]);
    mn[2] = std::min(mn[2], zs[i]);
    mx[2] = std::max(mx[2], zs[i]);
  }
}

void update_min_dist_sq_scalar(const double* xs, const double* ys, const double* zs,
                               std::size_t n, double qx, double qy, double qz,
                               double* d2) {
  for (std::size_t i = 0; i < n; ++i) {
    double d = dist_sq(xs[i], ys[i], zs[i], qx, qy, qz);
    if (d < d2[i]) d2[i] = d;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{
      transform_points_scalar, nearest_point_scalar,   collect_within_scalar,
      count_sum_within_scalar, sum_dist_to_point_scalar, minmax3_scalar,
      update_min_dist_sq_scalar,
  };
  return table;
}

}  // namespace binpose::kernels
