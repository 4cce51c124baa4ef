#pragma once

#include "lrfcal/simulator.hpp"

namespace lrfcal {

/// Flange orientation required at the base-plate touch: E z = −B z, E x = −B x, E y = B y.
Mat3 touch_orientation();

/// Robot configuration with the tool tip resting in the base-plate hole (z = 0).
struct TouchObservation {
  JointVector joints = JointVector::Zero();
};

/// Throws OrientationViolation if the flange is not in touch_orientation() within tol.
void check_touch_orientation(const DhTable& table, const JointVector& joints, double tol = 1e-9);

/// Tip height is zero at the touch, so t_z equals the flange height.
double calibrate_tool_z(const TouchObservation& obs, const DhTable& table);

/**
 * @brief (t_x, t_y) from the tip shift measured after turning joint 6 by 180°.
 *
 * `shift` is the base-frame xy displacement that brings the tip from its
 * post-rotation position (point 2) back to the hole (point 1). Under the
 * touch orientation the horizontal tip offset is (−t_x, t_y) before the turn
 * and (t_x, −t_y) after it, so shift = (−2 t_x, 2 t_y).
 */
Eigen::Vector2d calibrate_tool_xy(const Eigen::Vector2d& shift);

/// Arc-length bound: tip displacement caused by an orientation error acting on a tool-offset error.
double tooltip_error_bound(double orientation_error, double tool_error);

struct ToolCalibrationRun {
  JointVector touch_joints = JointVector::Zero();
  JointVector rotated_joints = JointVector::Zero();
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();
  ToolOffset recovered;
};

/// Runs the base-plate procedure in simulation against a known tool offset.
ToolCalibrationRun simulate_tool_calibration(const DhTable& table, const ToolOffset& truth_tool,
                                             const Eigen::Vector2d& hole_xy, const JointVector& seed_joints);

/// A configuration near the touch orientation, usable as IK seed for holes in front of the robot.
JointVector touch_seed_joints();

}  // namespace lrfcal
