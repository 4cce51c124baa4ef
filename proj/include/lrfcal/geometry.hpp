#pragma once

#include <Eigen/Dense>

#include <span>

namespace lrfcal {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/**
 * @brief Rigid-body transform (rotation + translation), meters.
 *
 * Composition follows the usual homogeneous-matrix convention:
 * (A * B).apply(p) == A.apply(B.apply(p)).
 */
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);

  RigidTransform operator*(const RigidTransform& rhs) const;
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  Eigen::Matrix4d matrix() const;

  // ‖RᵀR − I‖ elementwise and |det R − 1| both within tol.
  bool is_proper(double tol = 1e-10) const;
};

Mat3 rot_x(double angle);
Mat3 rot_z(double angle);
Mat3 axis_angle_matrix(const Vec3& unit_axis, double angle);

/// Geodesic angle between two rotations, radians in [0, π].
double rotation_distance(const Mat3& a, const Mat3& b);

/// Nearest rotation in the Frobenius sense (orthogonal Procrustes).
Mat3 nearest_rotation(const Mat3& m);

/// Returns sqrt(1 − x² − y²); throws OutOfDomain if x² + y² > 1 + 1e-12.
double complete_unit_vector(double x, double y);

/**
 * @brief Plane n·p = l in the robot base frame.
 *
 * The normal is stored through its (x, y) components; z is always the
 * non-negative completion, so planes whose normal points downward are
 * represented with the flipped normal and negated offset.
 */
struct PlaneParams {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  static PlaneParams from_components(double nx, double ny, double offset);
  /// Normalizes and flips to n_z >= 0.
  static PlaneParams from_normal(const Vec3& normal, double offset);

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

/// Total-least-squares plane through a point cloud (≥ 3 non-collinear points).
PlaneParams fit_plane(std::span<const Vec3> points);

}  // namespace lrfcal
