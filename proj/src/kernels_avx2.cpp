// AVX2 kernels, 4-wide double lanes. Per-lane arithmetic uses the same
// mul/add tree as the scalar reference (no FMA, fp-contract off) so
// element-level results are bit-identical; only reduction order differs.

#include "binpose/kernels.hpp"

#if defined(BINPOSE_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace binpose::kernels {
namespace {

inline __m256d dist_sq4(__m256d x, __m256d y, __m256d z, __m256d qx, __m256d qy,
                        __m256d qz) {
  __m256d dx = _mm256_sub_pd(x, qx);
  __m256d dy = _mm256_sub_pd(y, qy);
  __m256d dz = _mm256_sub_pd(z, qz);
  __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
  return _mm256_add_pd(s, _mm256_mul_pd(dz, dz));
}

inline double dist_sq1(double px, double py, double pz, double qx, double qy,
                       double qz) {
  double dx = px - qx, dy = py - qy, dz = pz - qz;
  return (dx * dx + dy * dy) + dz * dz;
}

void transform_points_avx2(const double* xs, const double* ys, const double* zs,
                           std::size_t n, const double* r, const double* t,
                           double* ox, double* oy, double* oz) {
  const __m256d r0 = _mm256_set1_pd(r[0]), r1 = _mm256_set1_pd(r[1]),
                r2 = _mm256_set1_pd(r[2]), r3 = _mm256_set1_pd(r[3]),
                r4 = _mm256_set1_pd(r[4]), r5 = _mm256_set1_pd(r[5]),
                r6 = _mm256_set1_pd(r[6]), r7 = _mm256_set1_pd(r[7]),
                r8 = _mm256_set1_pd(r[8]);
  const __m256d t0 = _mm256_set1_pd(t[0]), t1 = _mm256_set1_pd(t[1]),
                t2 = _mm256_set1_pd(t[2]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(xs + i);
    __m256d y = _mm256_loadu_pd(ys + i);
    __m256d z = _mm256_loadu_pd(zs + i);
    __m256d a = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r0, x), _mm256_mul_pd(r1, y)),
                      _mm256_mul_pd(r2, z)),
        t0);
    __m256d b = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r3, x), _mm256_mul_pd(r4, y)),
                      _mm256_mul_pd(r5, z)),
        t1);
    __m256d c = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r6, x), _mm256_mul_pd(r7, y)),
                      _mm256_mul_pd(r8, z)),
        t2);
    _mm256_storeu_pd(ox + i, a);
    _mm256_storeu_pd(oy + i, b);
    _mm256_storeu_pd(oz + i, c);
  }
  for (; i < n; ++i) {
    double x = xs[i], y = ys[i], z = zs[i];
    ox[i] = ((r[0] * x + r[1] * y) + r[2] * z) + t[0];
    oy[i] = ((r[3] * x + r[4] * y) + r[5] * z) + t[1];
    oz[i] = ((r[6] * x + r[7] * y) + r[8] * z) + t[2];
  }
}

std::size_t nearest_point_avx2(const double* xs, const double* ys, const double* zs,
                               std::size_t n, double qx, double qy, double qz,
                               double* best_d2) {
  const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                vqz = _mm256_set1_pd(qz);
  __m256d best = _mm256_set1_pd(HUGE_VAL);
  __m256i best_idx = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = dist_sq4(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i),
                         _mm256_loadu_pd(zs + i), vqx, vqy, vqz);
    // Strict less keeps the first occurrence within each lane.
    __m256d lt = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, d, lt);
    __m256i idx = _mm256_set1_epi64x(static_cast<long long>(i));
    best_idx =
        _mm256_blendv_epi8(best_idx, idx, _mm256_castpd_si256(lt));
  }
  alignas(32) double lane_d[4];
  alignas(32) long long lane_i[4];
  _mm256_store_pd(lane_d, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_idx);

  // Lane L at block base b holds element b + L; merge lanes lexicographically
  // by (distance, original index) so ties resolve to the lowest index.
  double bd = HUGE_VAL;
  std::size_t bi = 0;
  for (int lane = 0; lane < 4; ++lane) {
    if (lane_d[lane] == HUGE_VAL) continue;
    std::size_t gi = static_cast<std::size_t>(lane_i[lane]) + static_cast<std::size_t>(lane);
    if (lane_d[lane] < bd || (lane_d[lane] == bd && gi < bi)) {
      bd = lane_d[lane];
      bi = gi;
    }
  }
  for (; i < n; ++i) {
    double d = dist_sq1(xs[i], ys[i], zs[i], qx, qy, qz);
    if (d < bd || (d == bd && i < bi)) {
      bd = d;
      bi = i;
    }
  }
  *best_d2 = bd;
  return bi;
}

void collect_within_avx2(const double* xs, const double* ys, const double* zs,
                         std::size_t n, double qx, double qy, double qz, double r2,
                         std::uint32_t base, std::vector<std::uint32_t>& out) {
  const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                vqz = _mm256_set1_pd(qz), vr2 = _mm256_set1_pd(r2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = dist_sq4(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i),
                         _mm256_loadu_pd(zs + i), vqx, vqy, vqz);
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(d, vr2, _CMP_LE_OQ));
    while (mask) {
      int lane = __builtin_ctz(static_cast<unsigned>(mask));
      out.push_back(base + static_cast<std::uint32_t>(i) +
                    static_cast<std::uint32_t>(lane));
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    if (dist_sq1(xs[i], ys[i], zs[i], qx, qy, qz) <= r2)
      out.push_back(base + static_cast<std::uint32_t>(i));
  }
}

void count_sum_within_avx2(const double* xs, const double* ys, const double* zs,
                           std::size_t n, double qx, double qy, double qz, double r2,
                           std::size_t* count, double* sum_x, double* sum_y,
                           double* sum_z) {
  const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                vqz = _mm256_set1_pd(qz), vr2 = _mm256_set1_pd(r2);
  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd(),
          sz = _mm256_setzero_pd();
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(xs + i);
    __m256d y = _mm256_loadu_pd(ys + i);
    __m256d z = _mm256_loadu_pd(zs + i);
    __m256d d = dist_sq4(x, y, z, vqx, vqy, vqz);
    __m256d in = _mm256_cmp_pd(d, vr2, _CMP_LE_OQ);
    c += static_cast<std::size_t>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(in))));
    sx = _mm256_add_pd(sx, _mm256_and_pd(in, x));
    sy = _mm256_add_pd(sy, _mm256_and_pd(in, y));
    sz = _mm256_add_pd(sz, _mm256_and_pd(in, z));
  }
  alignas(32) double lx[4], ly[4], lz[4];
  _mm256_store_pd(lx, sx);
  _mm256_store_pd(ly, sy);
  _mm256_store_pd(lz, sz);
  double ax = (lx[0] + lx[1]) + (lx[2] + lx[3]);
  double ay = (ly[0] + ly[1]) + (ly[2] + ly[3]);
  double az = (lz[0] + lz[1]) + (lz[2] + lz[3]);
  for (; i < n; ++i) {
    if (dist_sq1(xs[i], ys[i], zs[i], qx, qy, qz) <= r2) {
      ++c;
      ax += xs[i];
      ay += ys[i];
      az += zs[i];
    }
  }
  *count = c;
  *sum_x = ax;
  *sum_y = ay;
  *sum_z = az;
}

double sum_dist_to_point_avx2(const double* xs, const double* ys, const double* zs,
                              std::size_t n, double cx, double cy, double cz) {
  const __m256d vcx = _mm256_set1_pd(cx), vcy = _mm256_set1_pd(cy),
                vcz = _mm256_set1_pd(cz);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = dist_sq4(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i),
                         _mm256_loadu_pd(zs + i), vcx, vcy, vcz);
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(d));
  }
  alignas(32) double l[4];
  _mm256_store_pd(l, acc);
  double s = (l[0] + l[1]) + (l[2] + l[3]);
  for (; i < n; ++i) s += std::sqrt(dist_sq1(xs[i], ys[i], zs[i], cx, cy, cz));
  return s;
}

void minmax3_avx2(const double* xs, const double* ys, const double* zs,
                  std::size_t n, double* mn, double* mx) {
  __m256d mnx = _mm256_set1_pd(xs[0]), mxx = mnx;
  __m256d mny = _mm256_set1_pd(ys[0]), mxy = mny;
  __m256d mnz = _mm256_set1_pd(zs[0]), mxz = mnz;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(xs + i);
    __m256d y = _mm256_loadu_pd(ys + i);
    __m256d z = _mm256_loadu_pd(zs + i);
    mnx = _mm256_min_pd(mnx, x);
    mxx = _mm256_max_pd(mxx, x);
    mny = _mm256_min_pd(mny, y);
    mxy = _mm256_max_pd(mxy, y);
    mnz = _mm256_min_pd(mnz, z);
    mxz = _mm256_max_pd(mxz, z);
  }
  alignas(32) double l[4];
  auto hmin = [&](__m256d v) {
    _mm256_store_pd(l, v);
    double r = l[0];
    for (int k = 1; k < 4; ++k) r = std::min(r, l[k]);
    return r;
  };
  auto hmax = [&](__m256d v) {
    _mm256_store_pd(l, v);
    double r = l[0];
    for (int k = 1; k < 4; ++k) r = std::max(r, l[k]);
    return r;
  };
  mn[0] = hmin(mnx);
  mx[0] = hmax(mxx);
  mn[1] = hmin(mny);
  mx[1] = hmax(mxy);
  mn[2] = hmin(mnz);
  mx[2] = hmax(mxz);
  for (; i < n; ++i) {
    mn[0] = std::min(mn[0], xs[i]);
    mx[0] = std::max(mx[0], xs[i]);
    mn[1] = std::min(mn[1], ys[i]);
    mx[1] = std::max(mx[1], ys[i]);
    mn[2] = std::min(mn[2], zs[i]);
    mx[2] = std::max(mx[2], zs[i]);
  }
}

void update_min_dist_sq_avx2(const double* xs, const double* ys, const double* zs,
                             std::size_t n, double qx, double qy, double qz,
                             double* d2) {
  const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                vqz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = dist_sq4(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i),
                         _mm256_loadu_pd(zs + i), vqx, vqy, vqz);
    __m256d cur = _mm256_loadu_pd(d2 + i);
    _mm256_storeu_pd(d2 + i, _mm256_min_pd(cur, d));
  }
  for (; i < n; ++i) {
    double d = dist_sq1(xs[i], ys[i], zs[i], qx, qy, qz);
    if (d < d2[i]) d2[i] = d;
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table{
      transform_points_avx2, nearest_point_avx2,     collect_within_avx2,
      count_sum_within_avx2, sum_dist_to_point_avx2, minmax3_avx2,
      update_min_dist_sq_avx2,
  };
  return table;
}

}  // namespace binpose::kernels

#endif  // BINPOSE_HAVE_AVX2
