#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "binpose/kernels.hpp"

using namespace binpose;

namespace {

struct Arrays {
  std::vector<double> x, y, z;
};

Arrays random_arrays(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Arrays a;
  for (std::size_t i = 0; i < n; ++i) {
    a.x.push_back(dist(rng));
    a.y.push_back(dist(rng));
    a.z.push_back(dist(rng));
  }
  return a;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  const kernels::Ops& ops = kernels::scalar_ops();
  CHECK(ops.transform_points != nullptr);
  CHECK(ops.nearest_point != nullptr);
}

TEST_CASE("avx2 backend matches scalar per the parity contract") {
  if (!kernels::avx2_available()) return;
  const kernels::Ops& s = kernels::scalar_ops();
  const kernels::Ops& v = kernels::backend_ops(kernels::Backend::avx2);

  // Sizes straddle the vector width so remainder lanes get exercised.
  for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 17u, 64u, 257u}) {
    Arrays a = random_arrays(n, 1000 + n);

    const double rot[9] = {0.36, 0.48, -0.8, -0.8, 0.6, 0.0, 0.48, 0.64, 0.6};
    const double tr[3] = {0.1, -0.2, 0.3};
    std::vector<double> sx(n), sy(n), sz(n), vx(n), vy(n), vz(n);
    s.transform_points(a.x.data(), a.y.data(), a.z.data(), n, rot, tr, sx.data(),
                       sy.data(), sz.data());
    v.transform_points(a.x.data(), a.y.data(), a.z.data(), n, rot, tr, vx.data(),
                       vy.data(), vz.data());
    CHECK(sx == vx);
    CHECK(sy == vy);
    CHECK(sz == vz);

    double sd2 = 0.0, vd2 = 0.0;
    std::size_t si = s.nearest_point(a.x.data(), a.y.data(), a.z.data(), n, 0.1, 0.2,
                                     0.3, &sd2);
    std::size_t vi = v.nearest_point(a.x.data(), a.y.data(), a.z.data(), n, 0.1, 0.2,
                                     0.3, &vd2);
    CHECK(si == vi);
    CHECK(sd2 == vd2);

    std::vector<std::uint32_t> sc, vc;
    s.collect_within(a.x.data(), a.y.data(), a.z.data(), n, 0.0, 0.0, 0.0, 2.5, 7, sc);
    v.collect_within(a.x.data(), a.y.data(), a.z.data(), n, 0.0, 0.0, 0.0, 2.5, 7, vc);
    CHECK(sc == vc);

    std::size_t scount = 0, vcount = 0;
    double ssx = 0, ssy = 0, ssz = 0, vsx = 0, vsy = 0, vsz = 0;
    s.count_sum_within(a.x.data(), a.y.data(), a.z.data(), n, 0.0, 0.0, 0.0, 2.5,
                       &scount, &ssx, &ssy, &ssz);
    v.count_sum_within(a.x.data(), a.y.data(), a.z.data(), n, 0.0, 0.0, 0.0, 2.5,
                       &vcount, &vsx, &vsy, &vsz);
    CHECK(scount == vcount);  // exact
    CHECK(ssx == doctest::Approx(vsx).epsilon(1e-12));
    CHECK(ssy == doctest::Approx(vsy).epsilon(1e-12));
    CHECK(ssz == doctest::Approx(vsz).epsilon(1e-12));

    double sdist = s.sum_dist_to_point(a.x.data(), a.y.data(), a.z.data(), n, 0.5,
                                       -0.5, 0.25);
    double vdist = v.sum_dist_to_point(a.x.data(), a.y.data(), a.z.data(), n, 0.5,
                                       -0.5, 0.25);
    CHECK(sdist == doctest::Approx(vdist).epsilon(1e-12));

    double smn[3], smx[3], vmn[3], vmx[3];
    s.minmax3(a.x.data(), a.y.data(), a.z.data(), n, smn, smx);
    v.minmax3(a.x.data(), a.y.data(), a.z.data(), n, vmn, vmx);
    for (int c = 0; c < 3; ++c) {
      CHECK(smn[c] == vmn[c]);
      CHECK(smx[c] == vmx[c]);
    }

    std::vector<double> sd(n, 0.7), vd(n, 0.7);
    s.update_min_dist_sq(a.x.data(), a.y.data(), a.z.data(), n, 0.1, 0.1, 0.1, sd.data());
    v.update_min_dist_sq(a.x.data(), a.y.data(), a.z.data(), n, 0.1, 0.1, 0.1, vd.data());
    CHECK(sd == vd);
  }
}

TEST_CASE("nearest_point resolves ties to the lowest index") {
  const kernels::Ops& ops = kernels::scalar_ops();
  std::vector<double> x{1.0, -1.0, 1.0}, y{0.0, 0.0, 0.0}, z{0.0, 0.0, 0.0};
  double d2 = 0.0;
  CHECK(ops.nearest_point(x.data(), y.data(), z.data(), 3, 0, 0, 0, &d2) == 0);
  CHECK(d2 == 1.0);
}

TEST_CASE("collect_within boundary is inclusive") {
  const kernels::Ops& ops = kernels::scalar_ops();
  std::vector<double> x{1.0, 2.0}, y{0.0, 0.0}, z{0.0, 0.0};
  std::vector<std::uint32_t> out;
  ops.collect_within(x.data(), y.data(), z.data(), 2, 0, 0, 0, 1.0, 0, out);
  CHECK(out == std::vector<std::uint32_t>{0});
}
