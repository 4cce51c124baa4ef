#include "lrfcal/errors.hpp"
#include "lrfcal/tooltip.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace lrfcal {
namespace {

const Eigen::Vector2d kHole(0.45, 0.05);

TEST(TouchOrientation, IsAProperRotation) {
  const Mat3 r = touch_orientation();
  EXPECT_TRUE((r * r.transpose()).isApprox(Mat3::Identity(), 1e-15));
  EXPECT_NEAR(r.determinant(), 1.0, 1e-15);
  EXPECT_EQ(r.col(2), Vec3(0, 0, -1));
}

TEST(ToolCalibration, RecoversOffsetExactly) {
  const DhTable table = nominal_denso_table();
  for (const Vec3& t : {Vec3(0.01, 0.02, 0.10), Vec3(0.0, 0.0, 0.15), Vec3(-0.015, 0.004, 0.12)}) {
    const ToolCalibrationRun run = simulate_tool_calibration(table, ToolOffset{t}, kHole, touch_seed_joints());
    EXPECT_LT((run.recovered.t - t).cwiseAbs().maxCoeff(), 1e-9) << t.transpose();
  }
}

TEST(ToolCalibration, TipSitsInTheHole) {
  const DhTable table = nominal_denso_table();
  const ToolOffset tool{Vec3(0.01, 0.02, 0.10)};
  const ToolCalibrationRun run = simulate_tool_calibration(table, tool, kHole, touch_seed_joints());
  const Vec3 tip = tool_tip_position(table, run.touch_joints, tool);
  EXPECT_LT((tip - Vec3(kHole.x(), kHole.y(), 0.0)).norm(), 1e-9);
  // The flange height is the tool length along z.
  EXPECT_NEAR(forward_kinematics(table, run.touch_joints).translation.z(), 0.10, 1e-9);
}

TEST(ToolCalibration, ShiftSignConvention) {
  // Computed straight from FK: half-turn about the flange z flips the horizontal offset.
  const DhTable table = nominal_denso_table();
  const ToolOffset tool{Vec3(0.01, 0.02, 0.10)};
  const ToolCalibrationRun run = simulate_tool_calibration(table, tool, kHole, touch_seed_joints());
  const Vec3 p1 = tool_tip_position(table, run.touch_joints, tool);
  const Vec3 p2 = tool_tip_position(table, run.rotated_joints, tool);
  EXPECT_NEAR((p1 - p2).x(), -0.02, 1e-9);
  EXPECT_NEAR((p1 - p2).y(), 0.04, 1e-9);
  EXPECT_NEAR(p1.z(), p2.z(), 1e-12);
  EXPECT_TRUE(calibrate_tool_xy(Eigen::Vector2d(-0.02, 0.04)).isApprox(Eigen::Vector2d(0.01, 0.02), 1e-15));
}

TEST(ToolCalibration, ZeroShiftMeansCentredTool) {
  EXPECT_EQ(calibrate_tool_xy(Eigen::Vector2d::Zero()), Eigen::Vector2d::Zero());
}

TEST(ToolCalibration, OrientationViolationIsRejected) {
  JointVector q = JointVector::Zero();  // flange pointing up
  EXPECT_THROW(calibrate_tool_z(TouchObservation{q}, nominal_denso_table()), OrientationViolation);
}

TEST(ToolErrorBound, ArcLength) {
  EXPECT_NEAR(tooltip_error_bound(0.02, 2.5e-3), 5e-5, 1e-18);
  EXPECT_EQ(tooltip_error_bound(0.0, 1.0), 0.0);
  EXPECT_THROW(tooltip_error_bound(-1.0, 1.0), InvalidInput);
}

TEST(ToolErrorBound, BoundsTheActualTipDisplacement) {
  const Vec3 err(0.0, 0.0, 2.5e-3);
  for (double angle : {0.005, 0.01, 0.02}) {
    const Mat3 r = axis_angle_matrix(Vec3(1, 0, 0), angle);
    EXPECT_LE(((r - Mat3::Identity()) * err).norm(), tooltip_error_bound(angle, err.norm()) + 1e-15);
  }
}

}  // namespace
}  // namespace lrfcal
