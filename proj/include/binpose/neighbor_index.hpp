#pragma once

#include <cstdint>
#include <vector>

#include "binpose/geometry.hpp"
#include "binpose/point_cloud.hpp"

namespace binpose {

/// Immutable k-d tree over a point cloud. Points are reordered into
/// contiguous leaf ranges so leaf scans run through the SIMD kernels.
/// Queries match a brute-force scan exactly, including the tie rule:
/// equal distances resolve to the lowest original point index.
class NeighborIndex {
 public:
  explicit NeighborIndex(const PointCloud& cloud, std::uint32_t leaf_size = 32);

  std::size_t size() const { return px_.size(); }
  bool empty() const { return px_.empty(); }

  struct Hit {
    std::size_t index;   // original point index
    double distance;
  };

  /// Throws std::invalid_argument on an empty index.
  Hit nearest(const Vec3& q) const;

  /// Original indices of all points with distance <= r, ascending.
  std::vector<std::uint32_t> radius(const Vec3& q, double r) const;

  /// Count and componentwise sum of points with distance <= r.
  void radius_sum(const Vec3& q, double r, std::size_t* count, Vec3* sum) const;

  Vec3 point(std::size_t original_index) const;

 private:
  struct Node {
    double bb_min[3];
    double bb_max[3];
    std::uint32_t begin, end;      // leaf range in reordered arrays
    std::int32_t left = -1, right = -1;
    std::size_t count;             // points under this node
    double sum[3];                 // componentwise sum under this node
    bool leaf() const { return left < 0; }
  };

  std::int32_t build(std::vector<std::uint32_t>& order, std::uint32_t lo,
                     std::uint32_t hi, const PointCloud& cloud,
                     std::uint32_t leaf_size);
  void nearest_rec(std::int32_t node, const Vec3& q, double* best_d2,
                   std::size_t* best_idx) const;
  void radius_rec(std::int32_t node, const Vec3& q, double r2,
                  std::vector<std::uint32_t>& out_pos) const;
  void radius_sum_rec(std::int32_t node, const Vec3& q, double r2,
                      std::size_t* count, double* sx, double* sy, double* sz) const;

  static double box_dist_sq(const Node& n, const Vec3& q);
  static bool box_inside_ball(const Node& n, const Vec3& q, double r2);

  std::vector<double> px_, py_, pz_;          // reordered coordinates
  std::vector<std::uint32_t> to_original_;    // reordered position -> original index
  std::vector<std::uint32_t> to_position_;    // original index -> reordered position
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace binpose
