#include "lrfcal/kinematics.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

namespace lrfcal {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(DhTransform, ZeroRowIsIdentity) {
  const RigidTransform t = dh_transform(DhRow{}, 0.0);
  EXPECT_TRUE(t.rotation.isApprox(Mat3::Identity(), 0.0));
  EXPECT_EQ(t.translation, Vec3::Zero());
}

TEST(DhTransform, OffsetOnlyRowTranslatesAlongZ) {
  const RigidTransform t = dh_transform(DhRow{0.0, 0.0, 0.0, 0.345}, 0.0);
  EXPECT_TRUE(t.rotation.isApprox(Mat3::Identity(), 0.0));
  EXPECT_DOUBLE_EQ(t.translation.z(), 0.345);
  EXPECT_DOUBLE_EQ(t.translation.x(), 0.0);
  EXPECT_DOUBLE_EQ(t.translation.y(), 0.0);
}

TEST(DhTransform, LinkLengthWithQuarterTurnMatchesMatrixOracle) {
  const DhRow row{0.305, 0.0, kPi / 2, 0.0};
  const Eigen::Matrix4d expected = test::oracle_joint(row, 0.0);
  EXPECT_TRUE(dh_transform(row, 0.0).matrix().isApprox(expected, 1e-15));
  // Length applied before the rotation: origin moves along the previous x.
  EXPECT_NEAR(dh_transform(row, 0.0).translation.x(), 0.305, 1e-15);
  EXPECT_NEAR(dh_transform(row, 0.0).rotation(1, 0), 1.0, 1e-15);
}

TEST(DhTransform, RandomRowsMatchMatrixOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const DhRow row{0.1 * u(rng), u(rng), u(rng), 0.1 * u(rng)};
    const double q = u(rng);
    EXPECT_TRUE(dh_transform(row, q).matrix().isApprox(test::oracle_joint(row, q), 1e-13));
  }
}

TEST(DhTransform, CancellingTheJointRotationLeavesTwistAndOffsets) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const DhRow row{0.1 * u(rng), u(rng), u(rng), 0.1 * u(rng)};
    const double q = u(rng);
    // T · Tz(−d) · Rz(−(θ+q)) · Tz(d) removes the joint rotation.
    const Eigen::Matrix4d m = dh_transform(row, q).matrix() * test::hz_trans(-row.d) *
                              test::hz_rot(-(row.theta + q)) * test::hz_trans(row.d);
    const Eigen::Matrix4d expected = test::hx_rot(row.alpha) * test::hx_trans(row.a) * test::hz_trans(row.d);
    EXPECT_TRUE(m.isApprox(expected, 1e-12));
  }
}

TEST(ForwardKinematics, ZeroTableZeroJointsIsIdentity) {
  const RigidTransform t = forward_kinematics(DhTable{}, JointVector::Zero());
  EXPECT_TRUE(t.matrix().isApprox(Eigen::Matrix4d::Identity(), 0.0));
}

TEST(ForwardKinematics, NominalTableAtHomeMatchesChainOracle) {
  const DhTable table = nominal_denso_table();
  const RigidTransform t = forward_kinematics(table, JointVector::Zero());
  EXPECT_TRUE(t.matrix().isApprox(test::oracle_chain(table, JointVector::Zero()), 1e-14));
  // Upright arm: 345 + 305 + 300 + 70 mm above the base, offset by a4 along x.
  EXPECT_NEAR(t.translation.x(), -0.010, 1e-15);
  EXPECT_NEAR(t.translation.y(), 0.0, 1e-15);
  EXPECT_NEAR(t.translation.z(), 1.020, 1e-15);
  EXPECT_TRUE(t.rotation.isApprox(Mat3::Identity(), 1e-15));
}

TEST(ForwardKinematics, NominalTablePinnedPose) {
  // Values from a separate numpy evaluation of the same chain.
  JointVector q;
  q << 0.3, -0.5, 1.1, 0.7, -0.9, 2.0;
  const RigidTransform t = forward_kinematics(nominal_denso_table(), q);
  EXPECT_NEAR(t.translation.x(), 0.01509189441722441, 1e-14);
  EXPECT_NEAR(t.translation.y(), -0.03230731171605159, 1e-14);
  EXPECT_NEAR(t.translation.z(), 0.9255026296473193, 1e-14);
  EXPECT_NEAR(t.rotation(0, 0), -0.9499941156841494, 1e-14);
  EXPECT_NEAR(t.rotation(1, 2), -0.5244982340587926, 1e-14);
  EXPECT_NEAR(t.rotation(2, 1), -0.4951413556137827, 1e-14);
}

TEST(ForwardKinematics, RandomPosesAreProperRigidTransforms) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const DhTable table = nominal_denso_table();
  for (int i = 0; i < 200; ++i) {
    JointVector q;
    for (int j = 0; j < 6; ++j) q(j) = u(rng);
    const RigidTransform t = forward_kinematics(table, q);
    EXPECT_TRUE(t.is_proper(1e-10));
    EXPECT_TRUE(t.matrix().isApprox(test::oracle_chain(table, q), 1e-12));
  }
}

TEST(ForwardKinematics, SingleJointComposedWithInverseIsIdentity) {
  DhTable table{};
  table[0] = DhRow{0.1, 0.4, -0.3, 0.2};
  JointVector q = JointVector::Zero();
  q(0) = 0.8;
  const RigidTransform t = forward_kinematics(table, q);
  EXPECT_TRUE((t * t.inverse()).matrix().isApprox(Eigen::Matrix4d::Identity(), 1e-14));
  EXPECT_TRUE((t * dh_transform(table[0], 0.8).inverse()).matrix().isApprox(Eigen::Matrix4d::Identity(), 1e-14));
}

TEST(ToolTip, ZeroOffsetIsFlangeTranslation) {
  JointVector q;
  q << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  const DhTable table = nominal_denso_table();
  EXPECT_EQ(tool_tip_position(table, q, ToolOffset{}), forward_kinematics(table, q).translation);
}

TEST(ToolTip, IdentityFlangeReturnsOffset) {
  const Vec3 tip = tool_tip_position(DhTable{}, JointVector::Zero(), ToolOffset{Vec3(0.01, 0.02, 0.10)});
  EXPECT_EQ(tip, Vec3(0.01, 0.02, 0.10));
}

TEST(ToolTip, RandomPosesMatchHomogeneousOracle) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const DhTable table = nominal_denso_table();
  for (int i = 0; i < 100; ++i) {
    JointVector q;
    for (int j = 0; j < 6; ++j) q(j) = u(rng);
    const Vec3 t(0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng));
    const Eigen::Vector4d expected = test::oracle_chain(table, q) * Eigen::Vector4d(t.x(), t.y(), t.z(), 1.0);
    EXPECT_LT((tool_tip_position(table, q, ToolOffset{t}) - expected.head<3>()).norm(), 1e-12);
  }
}

TEST(ToolTip, EqualRotationsPreserveDistanceForAnyOffset) {
  // Raising the base offset translates the whole chain, so both flanges share a rotation.
  const DhTable table = nominal_denso_table();
  JointVector q1;
  q1 << 0.2, -0.4, 1.0, 0.3, -0.6, 0.9;
  DhTable shifted = table;
  shifted[0].d += 0.25;
  const RigidTransform f1 = forward_kinematics(table, q1);
  const RigidTransform f2 = forward_kinematics(shifted, q1);
  ASSERT_TRUE(f1.rotation.isApprox(f2.rotation, 1e-15));
  for (const Vec3& t : {Vec3(0, 0, 0), Vec3(0.05, 0.05, 0.2), Vec3(-0.3, 0.1, 0.0)}) {
    const double tips = (tool_tip_position(shifted, q1, {t}) - tool_tip_position(table, q1, {t})).norm();
    EXPECT_NEAR(tips, (f2.translation - f1.translation).norm(), 1e-15);
  }
}

TEST(DhNames, FieldOrderAndJointNumbering) {
  EXPECT_EQ(dh_entry_name(0, 0), "a1");
  EXPECT_EQ(dh_entry_name(0, 1), "alpha1");
  EXPECT_EQ(dh_entry_name(2, 2), "theta3");
  EXPECT_EQ(dh_entry_name(5, 3), "d6");
}

TEST(DhTable, FinitenessChecks) {
  DhTable t = nominal_denso_table();
  EXPECT_TRUE(is_finite(t));
  t[3].alpha = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(is_finite(t));
  JointVector q = JointVector::Zero();
  EXPECT_TRUE(is_finite(q));
  q(2) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(is_finite(q));
}

}  // namespace
}  // namespace lrfcal
