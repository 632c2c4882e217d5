#include "binpose/neighbor_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "binpose/kernels.hpp"

namespace binpose {

NeighborIndex::NeighborIndex(const PointCloud& cloud, std::uint32_t leaf_size) {
  if (leaf_size == 0) throw std::invalid_argument("leaf_size must be positive");
  const std::size_t n = cloud.size();
  if (n == 0) return;

  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  nodes_.reserve(2 * n / leaf_size + 2);
  root_ = build(order, 0, static_cast<std::uint32_t>(n), cloud, leaf_size);

  // Leaves hold ascending original indices, so a first-minimum scan inside a
  // leaf already respects the lowest-index tie rule.
  for (Node& node : nodes_) {
    if (node.leaf())
      std::sort(order.begin() + node.begin, order.begin() + node.end);
  }

  px_.resize(n);
  py_.resize(n);
  pz_.resize(n);
  to_original_ = order;
  to_position_.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::uint32_t orig = order[pos];
    px_[pos] = cloud.x[orig];
    py_[pos] = cloud.y[orig];
    pz_[pos] = cloud.z[orig];
    to_position_[orig] = static_cast<std::uint32_t>(pos);
  }
}

std::int32_t NeighborIndex::build(std::vector<std::uint32_t>& order, std::uint32_t lo,
                                  std::uint32_t hi, const PointCloud& cloud,
                                  std::uint32_t leaf_size) {
  Node node;
  node.begin = lo;
  node.end = hi;
  node.count = hi - lo;
  node.bb_min[0] = node.bb_min[1] = node.bb_min[2] = HUGE_VAL;
  node.bb_max[0] = node.bb_max[1] = node.bb_max[2] = -HUGE_VAL;
  node.sum[0] = node.sum[1] = node.sum[2] = 0.0;
  for (std::uint32_t i = lo; i < hi; ++i) {
    Vec3 p = cloud.point(order[i]);
    const double c[3] = {p.x, p.y, p.z};
    for (int a = 0; a < 3; ++a) {
      node.bb_min[a] = std::min(node.bb_min[a], c[a]);
      node.bb_max[a] = std::max(node.bb_max[a], c[a]);
      node.sum[a] += c[a];
    }
  }

  int axis = 0;
  double widest = -1.0;
  for (int a = 0; a < 3; ++a) {
    double w = node.bb_max[a] - node.bb_min[a];
    if (w > widest) {
      widest = w;
      axis = a;
    }
  }

  if (hi - lo <= leaf_size || widest <= 0.0) {
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::uint32_t mid = lo + (hi - lo) / 2;
  auto coord = [&](std::uint32_t idx) {
    Vec3 p = cloud.point(idx);
    return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
  };
  std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                   [&](std::uint32_t a, std::uint32_t b) { return coord(a) < coord(b); });

  std::int32_t self = -1;
  {
    nodes_.push_back(node);
    self = static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t l = build(order, lo, mid, cloud, leaf_size);
  std::int32_t r = build(order, mid, hi, cloud, leaf_size);
  nodes_[static_cast<std::size_t>(self)].left = l;
  nodes_[static_cast<std::size_t>(self)].right = r;
  return self;
}

double NeighborIndex::box_dist_sq(const Node& n, const Vec3& q) {
  const double c[3] = {q.x, q.y, q.z};
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (c[a] < n.bb_min[a]) d = n.bb_min[a] - c[a];
    else if (c[a] > n.bb_max[a]) d = c[a] - n.bb_max[a];
    d2 += d * d;
  }
  return d2;
}

bool NeighborIndex::box_inside_ball(const Node& n, const Vec3& q, double r2) {
  const double c[3] = {q.x, q.y, q.z};
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = std::max(std::abs(n.bb_min[a] - c[a]), std::abs(n.bb_max[a] - c[a]));
    d2 += d * d;
  }
  return d2 <= r2;
}

NeighborIndex::Hit NeighborIndex::nearest(const Vec3& q) const {
  if (empty()) throw std::invalid_argument("empty index");
  double best_d2 = HUGE_VAL;
  std::size_t best_idx = 0;
  nearest_rec(root_, q, &best_d2, &best_idx);
  return {best_idx, std::sqrt(best_d2)};
}

void NeighborIndex::nearest_rec(std::int32_t ni, const Vec3& q, double* best_d2,
                                std::size_t* best_idx) const {
  const Node& node = nodes_[static_cast<std::size_t>(ni)];
  // Prune only on strictly greater: an equal-distance point with a lower
  // original index may still live inside this box.
  if (box_dist_sq(node, q) > *best_d2) return;
  if (node.leaf()) {
    double d2;
    std::size_t pos = kernels::ops().nearest_point(
        px_.data() + node.begin, py_.data() + node.begin, pz_.data() + node.begin,
        node.end - node.begin, q.x, q.y, q.z, &d2);
    std::size_t orig = to_original_[node.begin + pos];
    if (d2 < *best_d2 || (d2 == *best_d2 && orig < *best_idx)) {
      *best_d2 = d2;
      *best_idx = orig;
    }
    return;
  }
  const Node& lc = nodes_[static_cast<std::size_t>(node.left)];
  const Node& rc = nodes_[static_cast<std::size_t>(node.right)];
  if (box_dist_sq(lc, q) <= box_dist_sq(rc, q)) {
    nearest_rec(node.left, q, best_d2, best_idx);
    nearest_rec(node.right, q, best_d2, best_idx);
  } else {
    nearest_rec(node.right, q, best_d2, best_idx);
    nearest_rec(node.left, q, best_d2, best_idx);
  }
}

std::vector<std::uint32_t> NeighborIndex::radius(const Vec3& q, double r) const {
  std::vector<std::uint32_t> pos;
  if (!empty() && r >= 0.0) radius_rec(root_, q, r * r, pos);
  std::vector<std::uint32_t> out;
  out.reserve(pos.size());
  for (std::uint32_t p : pos) out.push_back(to_original_[p]);
  std::sort(out.begin(), out.end());
  return out;
}

void NeighborIndex::radius_rec(std::int32_t ni, const Vec3& q, double r2,
                               std::vector<std::uint32_t>& out_pos) const {
  const Node& node = nodes_[static_cast<std::size_t>(ni)];
  if (box_dist_sq(node, q) > r2) return;
  if (box_inside_ball(node, q, r2)) {
    for (std::uint32_t p = node.begin; p < node.end; ++p) out_pos.push_back(p);
    return;
  }
  if (node.leaf()) {
    kernels::ops().collect_within(px_.data() + node.begin, py_.data() + node.begin,
                                  pz_.data() + node.begin, node.end - node.begin, q.x,
                                  q.y, q.z, r2, node.begin, out_pos);
    return;
  }
  radius_rec(node.left, q, r2, out_pos);
  radius_rec(node.right, q, r2, out_pos);
}

void NeighborIndex::radius_sum(const Vec3& q, double r, std::size_t* count,
                               Vec3* sum) const {
  std::size_t c = 0;
  double sx = 0.0, sy = 0.0, sz = 0.0;
  if (!empty() && r >= 0.0) radius_sum_rec(root_, q, r * r, &c, &sx, &sy, &sz);
  *count = c;
  *sum = {sx, sy, sz};
}

void NeighborIndex::radius_sum_rec(std::int32_t ni, const Vec3& q, double r2,
                                   std::size_t* count, double* sx, double* sy,
                                   double* sz) const {
  const Node& node = nodes_[static_cast<std::size_t>(ni)];
  if (box_dist_sq(node, q) > r2) return;
  if (box_inside_ball(node, q, r2)) {
    *count += node.count;
    *sx += node.sum[0];
    *sy += node.sum[1];
    *sz += node.sum[2];
    return;
  }
  if (node.leaf()) {
    std::size_t c;
    double ax, ay, az;
    kernels::ops().count_sum_within(px_.data() + node.begin, py_.data() + node.begin,
                                    pz_.data() + node.begin, node.end - node.begin,
                                    q.x, q.y, q.z, r2, &c, &ax, &ay, &az);
    *count += c;
    *sx += ax;
    *sy += ay;
    *sz += az;
    return;
  }
  radius_sum_rec(node.left, q, r2, count, sx, sy, sz);
  radius_sum_rec(node.right, q, r2, count, sx, sy, sz);
}

Vec3 NeighborIndex::point(std::size_t original_index) const {
  std::uint32_t pos = to_position_[original_index];
  return {px_[pos], py_[pos], pz_[pos]};
}

}  // namespace binpose
