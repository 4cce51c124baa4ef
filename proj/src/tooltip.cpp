#include "lrfcal/tooltip.hpp"

#include "lrfcal/errors.hpp"

#include <cmath>
#include <numbers>

namespace lrfcal {

Mat3 touch_orientation() { return Eigen::Vector3d(-1.0, 1.0, -1.0).asDiagonal(); }

void check_touch_orientation(const DhTable& table, const JointVector& joints, double tol) {
  const Mat3 r = forward_kinematics(table, joints).rotation;
  const double dev = (r - touch_orientation()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw OrientationViolation("touch pose deviates from the prescribed flange orientation by " + std::to_string(dev));
  }
}

double calibrate_tool_z(const TouchObservation& obs, const DhTable& table) {
  check_touch_orientation(table, obs.joints);
  return forward_kinematics(table, obs.joints).translation.z();
}

Eigen::Vector2d calibrate_tool_xy(const Eigen::Vector2d& shift) { return {-0.5 * shift.x(), 0.5 * shift.y()}; }

double tooltip_error_bound(double orientation_error, double tool_error) {
  if (!(orientation_error >= 0.0) || !(tool_error >= 0.0)) throw InvalidInput("tooltip_error_bound: inputs must be >= 0");
  return orientation_error * tool_error;
}

JointVector touch_seed_joints() {
  JointVector q;
  q << 0.0, 0.3, 0.9, 0.0, 0.4, 0.0;
  return q;
}

ToolCalibrationRun simulate_tool_calibration(const DhTable& table, const ToolOffset& truth_tool,
                                             const Eigen::Vector2d& hole_xy, const JointVector& seed_joints) {
  RigidTransform target;
  target.rotation = touch_orientation();
  target.translation = Vec3(hole_xy.x(), hole_xy.y(), 0.0) - target.rotation * truth_tool.t;
  IkOptions ik;
  ik.max_iters = 1000;

  ToolCalibrationRun run;
  run.touch_joints = numerical_ik(table, target, seed_joints, ik);
  const double tz = calibrate_tool_z(TouchObservation{run.touch_joints}, table);

  run.rotated_joints = run.touch_joints;
  run.rotated_joints(5) += std::numbers::pi;
  const Vec3 point1 = tool_tip_position(table, run.touch_joints, truth_tool);
  const Vec3 point2 = tool_tip_position(table, run.rotated_joints, truth_tool);
  run.shift = (point1 - point2).head<2>();
  const Eigen::Vector2d txy = calibrate_tool_xy(run.shift);
  run.recovered.t = Vec3(txy.x(), txy.y(), tz);
  return run;
}

}  // namespace lrfcal
