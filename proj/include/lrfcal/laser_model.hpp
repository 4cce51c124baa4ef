#pragma once

#include "lrfcal/kinematics.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lrfcal {

/**
 * @brief Flange-to-laser pose in axis-angle form.
 *
 * Canonical form: unit axis with axis.z() >= 0 (the z component is always
 * the non-negative completion of x and y) and angle in [0, 2π).
 */
struct LaserExtrinsics {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;
  Vec3 position = Vec3::Zero();

  static LaserExtrinsics from_components(double rx, double ry, double angle, const Vec3& position);
  static LaserExtrinsics from_transform(const RigidTransform& flange_to_laser);

  RigidTransform transform() const;
};

/// CAD mounting of the profile scanner on the Denso flange.
LaserExtrinsics nominal_laser_extrinsics();

/// Profile point in the laser's measurement plane: lateral u, range w (meters).
struct ScanPoint {
  double u = 0.0;
  double w = 0.0;
};

/// Points live in the laser frame's x-z plane.
inline Vec3 embed(const ScanPoint& p) { return {p.u, 0.0, p.w}; }

/// One scanner reading of plate `plane_index` (0-based) at a robot pose.
struct ScanRecord {
  std::size_t plane_index = 0;
  JointVector joints = JointVector::Zero();
  std::vector<ScanPoint> points;
};

/// ^B T_L = ^B T_E * ^E T_L.
RigidTransform laser_pose(const DhTable& table, const JointVector& joints, const LaserExtrinsics& ext);

Vec3 laser_point_to_base(const DhTable& table, const JointVector& joints, const LaserExtrinsics& ext,
                         const ScanPoint& pt);

struct RansacOptions {
  double inlier_threshold = 0.5e-3;
  std::size_t iterations = 200;
  std::uint64_t seed = 0;
};

/**
 * @brief Indices of the points consistent with the dominant line of a profile.
 *
 * Two-point hypotheses drawn from a seeded shuffle of the index list; the
 * winning consensus set is refit by total least squares and re-thresholded.
 * Returned indices are ascending.
 */
std::vector<std::size_t> ransac_line_filter(std::span<const ScanPoint> profile,
                                            const RansacOptions& options = {});

/**
 * @brief Linear bootstrap of the laser extrinsics from scans of one plate.
 *
 * A least-squares plane fit (points mapped with the current extrinsics)
 * followed by a linear solve of n·(T_E (A p + b)) = l for the first and third
 * columns of A and for b; the second column of A is unobservable from x-z
 * profile points and is completed by a cross product. A is projected to the
 * nearest rotation after the solve.
 *
 * Extra rounds repeat the pair of steps. The alternation is not a
 * contraction, so more than a few rounds drifts away from the optimum.
 */
LaserExtrinsics initial_extrinsics_linear(std::span<const ScanRecord> records, const DhTable& table,
                                          const LaserExtrinsics& seed, std::size_t max_rounds = 1);

}  // namespace lrfcal
