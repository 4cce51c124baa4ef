#pragma once

#include "lrfcal/objective.hpp"
#include "lrfcal/simulator.hpp"

#include <span>
#include <vector>

namespace lrfcal {

struct ErrorSummary {
  double mean = 0.0;
  double std = 0.0;  // population (divide by n)
  double max = 0.0;
  std::size_t count = 0;
};

/// |n·p − l| for one point of one record.
double planar_error(const CalibrationParams& params, const ScanRecord& record, std::size_t point_index);

/// ||t₂ − t₁| − D| under the given kinematics and tool.
double tooltip_distance_error(const DhTable& dh, const HolePairRecord& pair, const ToolOffset& tool, double distance);

/// Flange-origin travel under the estimate versus under the truth model.
double oracle_distance_error(const DhTable& estimate, const DhTable& truth, const JointVector& first,
                             const JointVector& second);

ErrorSummary summarize(std::span<const double> values);

/// Every δ_p over a set of records, in record/point order.
std::vector<double> planar_errors(const CalibrationParams& params, std::span<const ScanRecord> records);
std::vector<double> tooltip_distance_errors(const DhTable& dh, std::span<const HolePairRecord> pairs,
                                            const ToolOffset& tool, double distance);
std::vector<double> oracle_distance_errors(const DhTable& estimate, const DhTable& truth,
                                           std::span<const OraclePosePair> pairs);

}  // namespace lrfcal
