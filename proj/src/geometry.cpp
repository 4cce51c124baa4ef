#include "lrfcal/geometry.hpp"

#include "lrfcal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lrfcal {

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  RigidTransform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

bool RigidTransform::is_proper(double tol) const {
  const Mat3 gram = rotation.transpose() * rotation - Mat3::Identity();
  return gram.cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Mat3 axis_angle_matrix(const Vec3& unit_axis, double angle) {
  return Eigen::AngleAxisd(angle, unit_axis).toRotationMatrix();
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  // atan2 form stays accurate near 0 and π, unlike acos of the trace.
  const Vec3 skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * skew.norm(), 0.5 * (rel.trace() - 1.0));
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * fix * svd.matrixV().transpose();
}

double complete_unit_vector(double x, double y) {
  const double s = x * x + y * y;
  if (!(s <= 1.0 + 1e-12)) {
    throw OutOfDomain("unit-vector completion: x^2 + y^2 = " + std::to_string(s) + " exceeds 1");
  }
  return std::sqrt(std::max(0.0, 1.0 - s));
}

PlaneParams PlaneParams::from_components(double nx, double ny, double offset) {
  PlaneParams p;
  p.normal = Vec3(nx, ny, complete_unit_vector(nx, ny));
  p.offset = offset;
  return p;
}

PlaneParams PlaneParams::from_normal(const Vec3& normal, double offset) {
  Vec3 n = normal.normalized();
  double l = offset / normal.norm();
  if (n.z() < 0.0) {
    n = -n;
    l = -l;
  }
  return from_components(n.x(), n.y(), l);
}

PlaneParams fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw InvalidInput("fit_plane: need at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Mat3 scatter = Mat3::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  // Eigenvalues ascending: the normal is the first eigenvector. A collinear
  // cloud has two (near) zero eigenvalues.
  if (eig.eigenvalues()(1) <= 1e-14 * std::max(1.0, eig.eigenvalues()(2))) {
    throw RankDeficient("fit_plane: points are collinear");
  }
  const Vec3 n = eig.eigenvectors().col(0);
  return PlaneParams::from_normal(n, n.dot(centroid));
}

}  // namespace lrfcal
