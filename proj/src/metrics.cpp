#include "lrfcal/metrics.hpp"

#include "lrfcal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lrfcal {

double planar_error(const CalibrationParams& params, const ScanRecord& record, std::size_t point_index) {
  if (record.plane_index >= params.planes.size()) throw std::out_of_range("planar_error: plane index");
  if (point_index >= record.points.size()) throw std::out_of_range("planar_error: point index");
  const Vec3 p = laser_point_to_base(params.dh, record.joints, params.ext, record.points[point_index]);
  return std::abs(params.planes[record.plane_index].signed_distance(p));
}

double tooltip_distance_error(const DhTable& dh, const HolePairRecord& pair, const ToolOffset& tool, double distance) {
  if (!(distance > 0.0)) throw InvalidInput("tooltip_distance_error: D must be positive");
  const Vec3 t1 = tool_tip_position(dh, pair.joints_first, tool);
  const Vec3 t2 = tool_tip_position(dh, pair.joints_second, tool);
  return std::abs((t2 - t1).norm() - distance);
}

double oracle_distance_error(const DhTable& estimate, const DhTable& truth, const JointVector& first,
                             const JointVector& second) {
  const double modeled =
      (forward_kinematics(estimate, second).translation - forward_kinematics(estimate, first).translation).norm();
  const double measured =
      (forward_kinematics(truth, second).translation - forward_kinematics(truth, first).translation).norm();
  return std::abs(modeled - measured);
}

ErrorSummary summarize(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("summarize: no values");
  ErrorSummary s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

std::vector<double> planar_errors(const CalibrationParams& params, std::span<const ScanRecord> records) {
  std::vector<double> out;
  const RigidTransform laser = params.ext.transform();
  for (const auto& rec : records) {
    if (rec.plane_index >= params.planes.size()) throw std::out_of_range("planar_errors: plane index");
    const RigidTransform pose = forward_kinematics(params.dh, rec.joints) * laser;
    const PlaneParams& plane = params.planes[rec.plane_index];
    for (const auto& p : rec.points) out.push_back(std::abs(plane.signed_distance(pose.apply(embed(p)))));
  }
  return out;
}

std::vector<double> tooltip_distance_errors(const DhTable& dh, std::span<const HolePairRecord> pairs,
                                            const ToolOffset& tool, double distance) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(tooltip_distance_error(dh, p, tool, distance));
  return out;
}

std::vector<double> oracle_distance_errors(const DhTable& estimate, const DhTable& truth,
                                           std::span<const OraclePosePair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(oracle_distance_error(estimate, truth, p.first, p.second));
  return out;
}

}  // namespace lrfcal
