#include "binpose/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace binpose {

Rot3 random_rotation(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(rng), u2 = unit(rng), u3 = unit(rng);
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double qx = a * std::sin(two_pi * u2), qy = a * std::cos(two_pi * u2);
  const double qz = b * std::sin(two_pi * u3), qw = b * std::cos(two_pi * u3);
  Rot3 r;
  r(0, 0) = 1 - 2 * (qy * qy + qz * qz);
  r(0, 1) = 2 * (qx * qy - qz * qw);
  r(0, 2) = 2 * (qx * qz + qy * qw);
  r(1, 0) = 2 * (qx * qy + qz * qw);
  r(1, 1) = 1 - 2 * (qx * qx + qz * qz);
  r(1, 2) = 2 * (qy * qz - qx * qw);
  r(2, 0) = 2 * (qx * qz - qy * qw);
  r(2, 1) = 2 * (qy * qz + qx * qw);
  r(2, 2) = 1 - 2 * (qx * qx + qy * qy);
  return r;
}

namespace {

Vec3 uniform_in_box(const AxisAlignedBox& box, Rng& rng) {
  std::uniform_real_distribution<double> ux(box.min_corner.x, box.max_corner.x);
  std::uniform_real_distribution<double> uy(box.min_corner.y, box.max_corner.y);
  std::uniform_real_distribution<double> uz(box.min_corner.z, box.max_corner.z);
  const double x = ux(rng), y = uy(rng), z = uz(rng);
  return {x, y, z};
}

void recompute_visibility(Scene& scene) {
  std::vector<std::size_t> counts(scene.poses.size(), 0);
  for (std::int32_t id : *scene.cloud.instance_ids)
    ++counts[static_cast<std::size_t>(id)];
  std::size_t n_max = 0;
  for (std::size_t c : counts) n_max = std::max(n_max, c);
  scene.visibility.assign(scene.poses.size(), 0.0);
  if (n_max > 0)
    for (std::size_t i = 0; i < counts.size(); ++i)
      scene.visibility[i] =
          static_cast<double>(counts[i]) / static_cast<double>(n_max);
  auto& vis = scene.cloud.visibility.emplace(scene.cloud.size());
  for (std::size_t p = 0; p < scene.cloud.size(); ++p)
    vis[p] = scene.visibility[static_cast<std::size_t>((*scene.cloud.instance_ids)[p])];
}

}  // namespace

Scene synth_scene(const ObjectModel& model, std::size_t n_instances,
                  const AxisAlignedBox& bin, std::uint64_t seed,
                  const SynthParams& params) {
  if (n_instances < 1) throw std::invalid_argument("need at least one instance");
  if (!bin.valid()) throw std::invalid_argument("invalid bin box");
  Scene scene;
  scene.bin = bin;
  scene.seed = seed;
  Rng rng = make_rng(derive_seed(seed, "synth", 0));

  std::vector<Vec3> centers;
  for (std::size_t i = 0; i < n_instances; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < params.placement_budget; ++attempt) {
      const Rot3 r = random_rotation(rng);
      const Vec3 t = uniform_in_box(bin, rng);
      bool clear = true;
      for (const Vec3& c : centers)
        if (distance(c, t) < 0.5 * model.diameter) {
          clear = false;
          break;
        }
      if (!clear) continue;
      centers.push_back(t);
      scene.poses.push_back({r, t});
      placed = true;
      break;
    }
    if (!placed) throw std::runtime_error("bin overfull");
  }

  // All instance points, then top-down occlusion: one survivor per grid
  // cell, the highest z (first comer wins ties).
  PointCloud all;
  std::vector<std::int32_t> ids;
  for (std::size_t i = 0; i < n_instances; ++i) {
    PointCloud placed = apply_pose(scene.poses[i], model.model);
    for (std::size_t p = 0; p < placed.size(); ++p) {
      all.push_back(placed.point(p));
      ids.push_back(static_cast<std::int32_t>(i));
    }
  }

  const std::size_t g = params.grid_resolution;
  const double ex = bin.max_corner.x - bin.min_corner.x;
  const double ey = bin.max_corner.y - bin.min_corner.y;
  if (g == 0 || ex <= 0.0 || ey <= 0.0)
    throw std::invalid_argument("degenerate depth grid");
  std::vector<std::ptrdiff_t> winner(g * g, -1);
  auto cell_of = [&](double v, double lo, double extent) {
    double f = (v - lo) / extent * static_cast<double>(g);
    const auto c = static_cast<std::ptrdiff_t>(std::floor(f));
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(c, 0, static_cast<std::ptrdiff_t>(g) - 1));
  };
  for (std::size_t p = 0; p < all.size(); ++p) {
    const std::size_t cx = cell_of(all.x[p], bin.min_corner.x, ex);
    const std::size_t cy = cell_of(all.y[p], bin.min_corner.y, ey);
    std::ptrdiff_t& w = winner[cy * g + cx];
    if (w < 0 || all.z[p] > all.z[static_cast<std::size_t>(w)])
      w = static_cast<std::ptrdiff_t>(p);
  }
  std::vector<bool> keep(all.size(), false);
  for (std::ptrdiff_t w : winner)
    if (w >= 0) keep[static_cast<std::size_t>(w)] = true;

  scene.cloud.instance_ids.emplace();
  for (std::size_t p = 0; p < all.size(); ++p)
    if (keep[p]) {
      scene.cloud.push_back(all.point(p));
      scene.cloud.instance_ids->push_back(ids[p]);
    }
  recompute_visibility(scene);
  return scene;
}

PredictionField oracle_predictor(const Scene& scene, const KeypointSet& keypoints,
                                 const ObjectModel& model, const NoiseModel& noise,
                                 std::uint64_t seed) {
  if (!scene.cloud.instance_ids)
    throw std::invalid_argument("scene lacks instance labels");
  PredictionField field;
  field.n_points = scene.cloud.size();
  field.n_k = keypoints.n_k();
  field.keypoints.resize(field.n_points * field.n_k);
  field.visibility.resize(field.n_points);

  Rng rng = make_rng(derive_seed(seed, "oracle", 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma_abs = noise.sigma * model.diameter;

  for (std::size_t i = 0; i < field.n_points; ++i) {
    const auto inst = static_cast<std::size_t>((*scene.cloud.instance_ids)[i]);
    const RigidPose& pose = scene.poses[inst];
    double v = scene.visibility[inst];
    if (noise.visibility_noise > 0.0) v += gauss(rng) * noise.visibility_noise;
    field.visibility[i] = std::clamp(v, 0.0, 1.0);

    for (std::size_t j = 0; j < field.n_k; ++j) {
      Vec3 pred;
      if (noise.p_out > 0.0 && unit(rng) < noise.p_out) {
        pred = uniform_in_box(scene.bin, rng);
      } else {
        Vec3 target = keypoints.keypoints[j];
        if (noise.p_amb > 0.0 && unit(rng) < noise.p_amb) {
          const auto& eq = keypoints.equivalents[j];
          std::uniform_int_distribution<std::size_t> pick(0, eq.size() - 1);
          target = eq[pick(rng)];
        }
        pred = pose.apply(target);
        if (sigma_abs > 0.0)
          pred += Vec3{gauss(rng), gauss(rng), gauss(rng)} * sigma_abs;
      }
      field.keypoint(i, j) = pred;
    }
  }
  return field;
}

Scene domain_shift(const Scene& scene, const ShiftParams& params, std::uint64_t seed) {
  if (!scene.cloud.instance_ids)
    throw std::invalid_argument("scene lacks instance labels");
  Scene out;
  out.poses = scene.poses;
  out.bin = scene.bin;
  out.seed = scene.seed;
  out.cloud.instance_ids.emplace();

  Rng rng = make_rng(derive_seed(seed, "shift", 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double ex = scene.bin.max_corner.x - scene.bin.min_corner.x;

  for (std::size_t p = 0; p < scene.cloud.size(); ++p) {
    if (params.dropout > 0.0 && unit(rng) < params.dropout) continue;
    if (params.resample_bias > 0.0) {
      const double ramp =
          ex > 0.0 ? (scene.cloud.x[p] - scene.bin.min_corner.x) / ex : 0.0;
      if (unit(rng) < params.resample_bias * std::clamp(ramp, 0.0, 1.0)) continue;
    }
    Vec3 pt = scene.cloud.point(p);
    if (params.z_noise > 0.0) pt.z += gauss(rng) * params.z_noise;
    out.cloud.push_back(pt);
    out.cloud.instance_ids->push_back((*scene.cloud.instance_ids)[p]);
  }
  recompute_visibility(out);
  return out;
}

namespace {

struct Tri {
  Vec3 a, b, c;
  double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

PointCloud sample_mesh(const std::vector<Tri>& tris, std::size_t n, Rng& rng) {
  std::vector<double> cumulative;
  double total = 0.0;
  for (const Tri& t : tris) {
    total += t.area();
    cumulative.push_back(total);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit(rng) * total;
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
        cumulative.begin());
    const Tri& t = tris[std::min(k, tris.size() - 1)];
    double u = unit(rng), v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    cloud.push_back(t.a + (t.b - t.a) * u + (t.c - t.a) * v);
  }
  return cloud;
}

void add_quad(std::vector<Tri>& tris, const Vec3& a, const Vec3& b, const Vec3& c,
              const Vec3& d) {
  tris.push_back({a, b, c});
  tris.push_back({a, c, d});
}

PointCloud sample_cylinder(double radius, double half_height, std::size_t n,
                           Rng& rng) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double side = two_pi * radius * 2.0 * half_height;
  const double cap = std::numbers::pi * radius * radius;
  const double total = side + 2.0 * cap;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit(rng) * total;
    const double theta = unit(rng) * two_pi;
    if (pick < side) {
      const double z = (unit(rng) * 2.0 - 1.0) * half_height;
      cloud.push_back({radius * std::cos(theta), radius * std::sin(theta), z});
    } else {
      const double rho = radius * std::sqrt(unit(rng));
      const double z = pick < side + cap ? half_height : -half_height;
      cloud.push_back({rho * std::cos(theta), rho * std::sin(theta), z});
    }
  }
  return cloud;
}

/// Tapered hexagonal frustum: hexagon of radius r_bottom at -h, r_top at +h,
/// vertices along 60-degree steps starting at +x. The taper distinguishes
/// top from bottom, so the proper symmetry group is exactly C6.
std::vector<Tri> hex_frustum_mesh(double r_bottom, double r_top, double h) {
  std::vector<Tri> tris;
  auto ring = [](double r, double z) {
    std::vector<Vec3> v;
    for (int k = 0; k < 6; ++k) {
      const double a = std::numbers::pi / 3.0 * k;
      v.push_back({r * std::cos(a), r * std::sin(a), z});
    }
    return v;
  };
  const std::vector<Vec3> bot = ring(r_bottom, -h), top = ring(r_top, h);
  const Vec3 cb{0, 0, -h}, ct{0, 0, h};
  for (int k = 0; k < 6; ++k) {
    const int k1 = (k + 1) % 6;
    tris.push_back({cb, bot[static_cast<std::size_t>(k1)], bot[static_cast<std::size_t>(k)]});
    tris.push_back({ct, top[static_cast<std::size_t>(k)], top[static_cast<std::size_t>(k1)]});
    add_quad(tris, bot[static_cast<std::size_t>(k)], bot[static_cast<std::size_t>(k1)],
             top[static_cast<std::size_t>(k1)], top[static_cast<std::size_t>(k)]);
  }
  return tris;
}

std::vector<Tri> box_mesh(double a, double b, double c) {
  std::vector<Tri> tris;
  const Vec3 v000{-a, -b, -c}, v100{a, -b, -c}, v010{-a, b, -c}, v110{a, b, -c};
  const Vec3 v001{-a, -b, c}, v101{a, -b, c}, v011{-a, b, c}, v111{a, b, c};
  add_quad(tris, v000, v100, v110, v010);  // bottom
  add_quad(tris, v001, v011, v111, v101);  // top
  add_quad(tris, v000, v001, v101, v100);  // y-
  add_quad(tris, v010, v110, v111, v011);  // y+
  add_quad(tris, v000, v010, v011, v001);  // x-
  add_quad(tris, v100, v101, v111, v110);  // x+
  return tris;
}

/// L profile in the xz plane extruded along y; mirror plane is xz.
std::vector<Tri> bracket_mesh(double arm_x, double arm_z, double thick, double w) {
  const double y0 = -w / 2.0, y1 = w / 2.0;
  // Profile corners, counterclockwise.
  const Vec3 p0{0, 0, 0}, p1{arm_x, 0, 0}, p2{arm_x, 0, thick}, p3{thick, 0, thick},
      p4{thick, 0, arm_z}, p5{0, 0, arm_z};
  auto at = [](const Vec3& p, double y) { return Vec3{p.x, y, p.z}; };
  std::vector<Tri> tris;
  const Vec3 prof[6] = {p0, p1, p2, p3, p4, p5};
  // End caps: the L splits into two rectangles.
  for (double y : {y0, y1}) {
    add_quad(tris, at(p0, y), at(p1, y), at(p2, y), at({thick, 0, thick}, y));
    add_quad(tris, at(p0, y), at(p3, y), at(p4, y), at(p5, y));
  }
  // Side walls along each profile edge.
  for (int k = 0; k < 6; ++k) {
    const Vec3& s = prof[k];
    const Vec3& e = prof[(k + 1) % 6];
    add_quad(tris, at(s, y0), at(e, y0), at(e, y1), at(s, y1));
  }
  return tris;
}

std::vector<Tri> tetra_mesh() {
  const Vec3 v0{0, 0, 0}, v1{0.07, 0, 0}, v2{0.01, 0.055, 0}, v3{0.02, 0.015, 0.06};
  return {{v0, v1, v2}, {v0, v1, v3}, {v0, v2, v3}, {v1, v2, v3}};
}

constexpr std::uint64_t kZooSeed = 0x62696e7a6f6fULL;

}  // namespace

ObjectModel zoo_object(std::string_view name, std::size_t n_points) {
  Rng rng = make_rng(derive_seed(kZooSeed, name, n_points));
  if (name == "cylinder") {
    SymmetrySpec spec;
    spec.symmetry_class = SymmetryClass::revolution;
    spec.rotation_axis = Vec3{0, 0, 1};
    spec.group = {Rot3::identity(), Rot3::axis_angle({1, 0, 0}, std::numbers::pi)};
    return make_object_model("cylinder", sample_cylinder(0.030, 0.050, n_points, rng),
                             spec);
  }
  if (name == "hexprism") {
    SymmetrySpec spec;
    spec.symmetry_class = SymmetryClass::finite;
    spec.rotation_axis = Vec3{0, 0, 1};
    spec.group = cyclic_group({0, 0, 1}, 6);
    return make_object_model(
        "hexprism", sample_mesh(hex_frustum_mesh(0.035, 0.028, 0.018), n_points, rng),
        spec);
  }
  if (name == "brick") {
    SymmetrySpec spec;
    spec.symmetry_class = SymmetryClass::finite;
    spec.rotation_axis = Vec3{0, 0, 1};
    spec.group = {Rot3::identity(), Rot3::axis_angle({1, 0, 0}, std::numbers::pi),
                  Rot3::axis_angle({0, 1, 0}, std::numbers::pi),
                  Rot3::axis_angle({0, 0, 1}, std::numbers::pi)};
    return make_object_model(
        "brick", sample_mesh(box_mesh(0.050, 0.035, 0.020), n_points, rng), spec);
  }
  if (name == "bracket") {
    SymmetrySpec spec;
    spec.symmetry_class = SymmetryClass::mirror;
    spec.mirror_plane_axes = {Vec3{1, 0, 0}, Vec3{0, 0, 1}};
    return make_object_model(
        "bracket",
        sample_mesh(bracket_mesh(0.060, 0.050, 0.015, 0.030), n_points, rng), spec);
  }
  if (name == "tetra") {
    SymmetrySpec spec;
    spec.symmetry_class = SymmetryClass::no_proper;
    return make_object_model("tetra", sample_mesh(tetra_mesh(), n_points, rng), spec);
  }
  throw std::invalid_argument("unknown zoo object: " + std::string(name));
}

std::vector<std::string> zoo_names() {
  return {"cylinder", "hexprism", "brick", "bracket", "tetra"};
}

}  // namespace binpose
