#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace binpose::kernels {

// Data-parallel inner loops over SoA point arrays. Every kernel has a scalar
// reference implementation and an AVX2 variant; the active table is resolved
// once at startup from CPU capabilities (override with BINPOSE_SIMD=scalar|avx2).
//
// Parity contract between backends, relied on by the equivalence tests:
//   - transform_points, nearest_point, collect_within, update_min_dist_sq and
//     minmax3 are bit-identical (same per-element operation tree, both TUs
//     compiled with fp-contract off),
//   - the count of count_sum_within is exact; its sums and sum_dist_to_point
//     differ only by floating-point reduction order.

struct Ops {
  // out[i] = R * p[i] + t (R row major).
  void (*transform_points)(const double* xs, const double* ys, const double* zs,
                           std::size_t n, const double* rotation,
                           const double* translation, double* out_x, double* out_y,
                           double* out_z);

  // Index of the point with minimal squared distance to q; ties resolve to the
  // lowest index. Requires n > 0. Writes the squared distance to *best_d2.
  std::size_t (*nearest_point)(const double* xs, const double* ys, const double* zs,
                               std::size_t n, double qx, double qy, double qz,
                               double* best_d2);

  // Appends base+i, in ascending i, for every point with d^2(p_i, q) <= r2.
  void (*collect_within)(const double* xs, const double* ys, const double* zs,
                         std::size_t n, double qx, double qy, double qz, double r2,
                         std::uint32_t base, std::vector<std::uint32_t>& out);

  // Count and componentwise sum of the points with d^2(p_i, q) <= r2.
  void (*count_sum_within)(const double* xs, const double* ys, const double* zs,
                           std::size_t n, double qx, double qy, double qz, double r2,
                           std::size_t* count, double* sum_x, double* sum_y,
                           double* sum_z);

  // Sum of Euclidean distances |p_i - c|.
  double (*sum_dist_to_point)(const double* xs, const double* ys, const double* zs,
                              std::size_t n, double cx, double cy, double cz);

  // Componentwise min and max. Requires n > 0.
  void (*minmax3)(const double* xs, const double* ys, const double* zs, std::size_t n,
                  double* mn, double* mx);

  // d2[i] = min(d2[i], d^2(p_i, q)). Farthest-point sampling inner loop.
  void (*update_min_dist_sq)(const double* xs, const double* ys, const double* zs,
                             std::size_t n, double qx, double qy, double qz,
                             double* d2);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();
bool avx2_available();        // compiled in and supported by this CPU
const Ops& backend_ops(Backend b);  // throws if unavailable

const Ops& ops();             // active table
Backend active_backend();
void force_backend(Backend b);  // test hook; throws if unavailable

}  // namespace binpose::kernels
