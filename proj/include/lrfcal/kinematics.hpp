#pragma once

#include "lrfcal/geometry.hpp"

#include <array>
#include <string>

namespace lrfcal {

/**
 * @brief One row of a Denavit-Hartenberg table (meters, radians).
 *
 * Modified (Craig / proximal) convention: row i holds the twist and length
 * of the link *preceding* joint i, so
 *
 *   T_i = Rot_x(alpha) * Trans_x(a) * Rot_z(theta + q_i) * Trans_z(d)
 *
 * With this convention the first row's (alpha, a, theta, d) are a pure base
 * transform and the last row's (theta, d) are absorbed by anything mounted
 * on the flange.
 */
struct DhRow {
  double a = 0.0;
  double alpha = 0.0;
  double theta = 0.0;
  double d = 0.0;

  bool operator==(const DhRow&) const = default;
};

inline constexpr std::size_t kJointCount = 6;

using DhTable = std::array<DhRow, kJointCount>;
using JointVector = Eigen::Matrix<double, 6, 1>;

/// Flange-frame tool-tip position, meters.
struct ToolOffset {
  Vec3 t = Vec3::Zero();
};

bool is_finite(const DhTable& table);
bool is_finite(const JointVector& q);

RigidTransform dh_transform(const DhRow& row, double joint_angle);

/// Base-to-flange pose: product of the six joint transforms.
RigidTransform forward_kinematics(const DhTable& table, const JointVector& joints);

Vec3 tool_tip_position(const DhTable& table, const JointVector& joints, const ToolOffset& tool);

/// Denso VS060 manufacturer table, converted to meters/radians.
DhTable nominal_denso_table();

/// Field name of a DH entry as used in files and masks, e.g. "alpha3".
std::string dh_entry_name(std::size_t joint, std::size_t field);

}  // namespace lrfcal
