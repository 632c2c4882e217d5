#include "binpose/knn_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "binpose/rng.hpp"

namespace binpose {

namespace {

double descriptor_dist_sq(const std::array<double, kDescriptorSize>& a,
                          const std::array<double, kDescriptorSize>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

Vec3 nearest_of(const std::vector<Vec3>& candidates, const Vec3& p) {
  Vec3 best = candidates.front();
  double best_d = squared_distance(best, p);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    double d = squared_distance(candidates[i], p);
    if (d < best_d) {
      best_d = d;
      best = candidates[i];
    }
  }
  return best;
}

}  // namespace

LocalFrame local_frame(const PointCloud& cloud, const NeighborIndex& index,
                       std::uint32_t point, double radius) {
  const Vec3 p = cloud.point(point);
  const auto hits = index.radius(p, radius);

  Vec3 c{0.0, 0.0, 0.0};
  for (std::uint32_t hit : hits) {
    Vec3 q = cloud.point(hit);
    c.x += q.x;
    c.y += q.y;
    c.z += q.z;
  }
  const double inv_n = 1.0 / static_cast<double>(hits.size());
  c = inv_n * c;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::uint32_t hit : hits) {
    Vec3 q = cloud.point(hit);
    Eigen::Vector3d d(q.x - c.x, q.y - c.y, q.z - c.z);
    cov += d * d.transpose();
  }
  cov *= inv_n;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d values = eig.eigenvalues();    // ascending
  const Eigen::Matrix3d vectors = eig.eigenvectors();

  Vec3 x{vectors(0, 2), vectors(1, 2), vectors(2, 2)};
  Vec3 z{vectors(0, 0), vectors(1, 0), vectors(2, 0)};

  // Point each axis away from the local mass so the frame is reproducible
  // across rigid motions of the same patch.
  const Vec3 toward{c.x - p.x, c.y - p.y, c.z - p.z};
  if (toward.dot(x) > 0.0) x = -x;
  if (toward.dot(z) > 0.0) z = -z;
  const Vec3 y = z.cross(x);

  LocalFrame frame;
  frame.rotation.m = {x.x, y.x, z.x, x.y, y.y, z.y, x.z, y.z, z.z};

  const double s = 1.0 / radius;
  const Vec3 local = frame.rotation.transposed().apply(toward);
  frame.descriptor = {std::sqrt(std::max(values(2), 0.0)) * s,
                      std::sqrt(std::max(values(1), 0.0)) * s,
                      std::sqrt(std::max(values(0), 0.0)) * s,
                      local.x * s,
                      local.y * s,
                      local.z * s};
  return frame;
}

KnnPredictor::KnnPredictor(std::vector<KnnEntry> entries, std::size_t n_k,
                           double radius)
    : entries_(std::move(entries)), n_k_(n_k), radius_(radius) {
  if (n_k_ == 0) throw std::invalid_argument("no keypoint types");
  if (!(radius_ > 0.0)) throw std::invalid_argument("radius must be positive");
  for (const auto& entry : entries_) {
    if (entry.offsets.size() != n_k_) {
      throw std::invalid_argument("entry offset count mismatch");
    }
  }
}

PredictionField KnnPredictor::predict(const PointCloud& scene) const {
  PredictionField field;
  field.n_points = scene.size();
  field.n_k = n_k_;
  field.keypoints.assign(scene.size() * n_k_, Vec3{});
  field.visibility.assign(scene.size(), 0.0);
  if (scene.empty()) return field;

  NeighborIndex index(scene);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const Vec3 p = scene.point(i);
    const LocalFrame frame =
        local_frame(scene, index, static_cast<std::uint32_t>(i), radius_);
    if (entries_.empty()) {
      for (std::size_t j = 0; j < n_k_; ++j) field.keypoints[i * n_k_ + j] = p;
      continue;
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      double d = descriptor_dist_sq(frame.descriptor, entries_[e].descriptor);
      if (d < best_d) {
        best_d = d;
        best = e;
      }
    }
    const KnnEntry& hit = entries_[best];
    for (std::size_t j = 0; j < n_k_; ++j) {
      Vec3 off = frame.rotation.apply(hit.offsets[j]);
      field.keypoints[i * n_k_ + j] = Vec3{p.x + off.x, p.y + off.y, p.z + off.z};
    }
    field.visibility[i] = hit.visibility;
  }
  return field;
}

KnnTrainer::KnnTrainer(KnnConfig config, std::vector<LabeledScene> source)
    : config_(std::move(config)), source_(std::move(source)) {
  if (!(config_.radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (config_.max_entries == 0) throw std::invalid_argument("max_entries must be positive");
}

namespace {

void collect_entries(const std::vector<LabeledScene>& scenes, double radius,
                     std::size_t& n_k, std::vector<KnnEntry>& out) {
  for (const auto& scene : scenes) {
    const PseudoLabelSet& labels = scene.labels;
    if (labels.n_points != scene.cloud.size()) {
      throw std::invalid_argument("label count mismatch");
    }
    if (n_k == 0) n_k = labels.n_k;
    if (labels.n_k != n_k) throw std::invalid_argument("keypoint type count mismatch");

    NeighborIndex index(scene.cloud);
    for (std::size_t p = 0; p < labels.n_points; ++p) {
      if (!labels.mask[p]) continue;
      const auto inst_idx = labels.instance_of[p];
      if (inst_idx < 0) throw std::invalid_argument("masked point without instance");
      const auto& inst = labels.instances[static_cast<std::size_t>(inst_idx)];

      const LocalFrame frame =
          local_frame(scene.cloud, index, static_cast<std::uint32_t>(p), radius);
      const Rot3 world_to_local = frame.rotation.transposed();
      const Vec3 point = scene.cloud.point(p);

      KnnEntry entry;
      entry.descriptor = frame.descriptor;
      entry.visibility = inst.visibility;
      entry.offsets.reserve(n_k);
      for (std::size_t j = 0; j < n_k; ++j) {
        Vec3 target = nearest_of(inst.keypoint_equivalents[j], point);
        entry.offsets.push_back(world_to_local.apply(
            Vec3{target.x - point.x, target.y - point.y, target.z - point.z}));
      }
      out.push_back(std::move(entry));
    }
  }
}

}  // namespace

std::shared_ptr<const Predictor> KnnTrainer::train(
    const std::vector<LabeledScene>& scenes) const {
  std::vector<KnnEntry> entries;
  std::size_t n_k = 0;
  if (config_.retain_source || scenes.empty()) {
    collect_entries(source_, config_.radius, n_k, entries);
  }
  collect_entries(scenes, config_.radius, n_k, entries);
  if (entries.empty()) throw std::invalid_argument("no training data");

  if (entries.size() > config_.max_entries) {
    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(derive_seed(config_.seed, "knn-db", 0));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(config_.max_entries);
    std::sort(order.begin(), order.end());
    std::vector<KnnEntry> kept;
    kept.reserve(order.size());
    for (std::size_t i : order) kept.push_back(std::move(entries[i]));
    entries = std::move(kept);
  }
  return std::make_shared<KnnPredictor>(std::move(entries), n_k, config_.radius);
}

}  // namespace binpose
