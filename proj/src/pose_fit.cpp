#include "binpose/pose_fit.hpp"

#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace binpose {

RigidPose fit_rigid(const std::vector<Vec3>& source, const std::vector<Vec3>& target) {
  if (source.size() != target.size())
    throw std::invalid_argument("fit_rigid length mismatch");
  if (source.size() < 2) throw std::invalid_argument("underdetermined");
  const double n = static_cast<double>(source.size());

  Vec3 sc{0, 0, 0}, tc{0, 0, 0};
  for (const Vec3& p : source) sc = sc + p;
  for (const Vec3& p : target) tc = tc + p;
  sc = sc / n;
  tc = tc / n;

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Vec3 s = source[i] - sc, t = target[i] - tc;
    const Eigen::Vector3d es(s.x, s.y, s.z), et(t.x, t.y, t.z);
    h += es * et.transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();

  Rot3 r = Rot3::identity();
  if (sv(0) > 0.0 && sv(1) <= 1e-12 * sv(0)) {
    // Collinear correspondences: align the dominant direction pair with the
    // smallest-angle rotation.
    const Eigen::Vector3d u = svd.matrixU().col(0), v = svd.matrixV().col(0);
    r = Rot3::between({u(0), u(1), u(2)}, {v(0), v(1), v(2)});
  } else if (sv(0) > 0.0) {
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Eigen::Matrix3d rot = svd.matrixV() * d * svd.matrixU().transpose();
    r = Rot3{{rot(0, 0), rot(0, 1), rot(0, 2), rot(1, 0), rot(1, 1), rot(1, 2),
              rot(2, 0), rot(2, 1), rot(2, 2)}};
  }

  return RigidPose{r, tc - r.apply(sc)};
}

double fit_residual(const std::vector<Vec3>& source, const std::vector<Vec3>& target,
                    const RigidPose& pose) {
  double sum = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i)
    sum += (target[i] - pose.apply(source[i])).squared_norm();
  return sum;
}

}  // namespace binpose
