#pragma once

#include "lrfcal/laser_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace lrfcal {

/// Everything the calibration estimates: robot, laser mounting, plates.
struct CalibrationParams {
  DhTable dh{};
  LaserExtrinsics ext;
  std::vector<PlaneParams> planes;
};

/// Tool-tip touches of the two holes of one plate location, same orientation.
struct HolePairRecord {
  std::size_t location_index = 0;
  JointVector joints_first = JointVector::Zero();
  JointVector joints_second = JointVector::Zero();
};

// Canonical flat layout: 24 DH entries (a, alpha, theta, d per joint), then
// the laser (rx, ry, rz, rw, px, py, pz), then (nx, ny, nz, l) per plane.
inline constexpr std::size_t kDhEntryCount = 24;
inline constexpr std::size_t kLaserOffset = 24;
inline constexpr std::size_t kPlaneOffset = 31;

constexpr std::size_t parameter_count(std::size_t planes) { return kPlaneOffset + 4 * planes; }

std::vector<std::string> parameter_names(std::size_t planes);
/// Index of a named entry; throws InvalidInput for unknown names.
std::size_t parameter_index(const std::string& name, std::size_t planes);
/// rz and every nkz: always recomputed from their unit-vector partners.
std::vector<std::size_t> dependent_indices(std::size_t planes);
bool is_angle_entry(std::size_t index);

std::vector<double> flatten(const CalibrationParams& params);
CalibrationParams unflatten(std::span<const double> values, std::size_t planes);

enum class ParamRole : unsigned char { Free, Fixed, Dependent };

class ParameterMask {
 public:
  /// Throws MaskConflict unless the Dependent roles sit exactly on dependent_indices().
  ParameterMask(std::vector<ParamRole> roles, std::size_t planes);

  static ParameterMask all_free(std::size_t planes);
  static ParameterMask with_fixed(std::size_t planes, std::span<const std::string> fixed_names);

  std::size_t plane_count() const { return planes_; }
  const std::vector<ParamRole>& roles() const { return roles_; }
  std::vector<std::size_t> free_indices() const;
  std::vector<std::string> fixed_names() const;
  std::size_t free_count() const;

 private:
  std::vector<ParamRole> roles_;
  std::size_t planes_;
};

/// Reference values for the non-free entries plus the mask that selects the free ones.
struct PackContext {
  ParameterMask mask;
  std::vector<double> reference;
};

struct PackedParameters {
  Eigen::VectorXd free;
  PackContext context;
};

PackedParameters pack_parameters(const CalibrationParams& params, const ParameterMask& mask);
CalibrationParams unpack_parameters(const Eigen::VectorXd& free, const PackContext& context);

/// True when every unit-vector pair of `free` satisfies x² + y² <= 1.
bool in_domain(const Eigen::VectorXd& free, const PackContext& context);

/// Signed plane residuals n·p − l, one per point, ordered by (plane, record, point).
Eigen::VectorXd planar_residuals(const CalibrationParams& params, std::span<const ScanRecord> scans);

/// |t₂ − t₁| − D per pair, ordered by location index.
Eigen::VectorXd distance_residuals(const DhTable& dh, std::span<const HolePairRecord> pairs,
                                   const ToolOffset& tool, double distance);

/// Planar residuals stacked over sqrt(w)-scaled distance residuals.
Eigen::VectorXd scalar_residuals(const CalibrationParams& params, std::span<const ScanRecord> scans,
                                 std::span<const HolePairRecord> pairs, const ToolOffset& tool,
                                 double distance, double weight);

}  // namespace lrfcal
