#include "lrfcal/kinematics.hpp"

#include <cmath>
#include <numbers>

namespace lrfcal {

namespace {

constexpr double deg(double v) { return v * std::numbers::pi / 180.0; }
constexpr double mm(double v) { return v * 1e-3; }

constexpr std::array<const char*, 4> kFieldNames{"a", "alpha", "theta", "d"};

}  // namespace

bool is_finite(const DhTable& table) {
  for (const auto& r : table) {
    if (!std::isfinite(r.a) || !std::isfinite(r.alpha) || !std::isfinite(r.theta) ||
        !std::isfinite(r.d)) {
      return false;
    }
  }
  return true;
}

bool is_finite(const JointVector& q) { return q.allFinite(); }

RigidTransform dh_transform(const DhRow& row, double joint_angle) {
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  const double ct = std::cos(row.theta + joint_angle), st = std::sin(row.theta + joint_angle);
  RigidTransform t;
  t.rotation << ct, -st, 0.0,
                ca * st, ca * ct, -sa,
                sa * st, sa * ct, ca;
  t.translation << row.a, -sa * row.d, ca * row.d;
  return t;
}

RigidTransform forward_kinematics(const DhTable& table, const JointVector& joints) {
  RigidTransform pose;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    pose = pose * dh_transform(table[i], joints(static_cast<Eigen::Index>(i)));
  }
  return pose;
}

Vec3 tool_tip_position(const DhTable& table, const JointVector& joints, const ToolOffset& tool) {
  return forward_kinematics(table, joints).apply(tool.t);
}

DhTable nominal_denso_table() {
  //        a          alpha       theta       d
  return {{{mm(0.0), deg(0.0), deg(0.0), mm(345.0)},
           {mm(0.0), deg(-90.0), deg(-90.0), mm(0.0)},
           {mm(305.0), deg(0.0), deg(90.0), mm(0.0)},
           {mm(-10.0), deg(90.0), deg(0.0), mm(300.0)},
           {mm(0.0), deg(-90.0), deg(0.0), mm(0.0)},
           {mm(0.0), deg(90.0), deg(0.0), mm(70.0)}}};
}

std::string dh_entry_name(std::size_t joint, std::size_t field) {
  return std::string(kFieldNames.at(field)) + std::to_string(joint + 1);
}

}  // namespace lrfcal
