#pragma once

#include "lrfcal/objective.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrfcal {

struct GroundTruth {
  DhTable dh{};
  LaserExtrinsics ext;
  std::vector<PlaneParams> planes;
  ToolOffset tool;
  double distance = 0.5;
};

/// Sensor and operator error model. Laser noise is range noise along each ray.
struct NoiseModel {
  double laser_sigma = 0.0;
  double outlier_rate = 0.0;
  double outlier_magnitude = 5e-3;
  /// Per-touch tip placement error (isotropic Gaussian), meters.
  double touch_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Profile scanner working envelope and pose sampler limits.
struct ScanGeometry {
  double min_range = 0.10;
  double max_range = 0.30;
  double fan_half_angle = 10.0 * 3.14159265358979323846 / 180.0;
  double max_incidence = 30.0 * 3.14159265358979323846 / 180.0;
  double joint_range = 2.5;
  std::size_t max_attempts_per_pose = 20000;
};

struct IkOptions {
  double position_tol = 1e-9;
  double rotation_tol = 1e-9;
  int max_iters = 200;
};

/// Uniform per-entry perturbation: a and d by ±linear, alpha and theta by ±angular.
DhTable perturb_dh(const DhTable& nominal, double linear_range, double angular_range, std::uint64_t seed);
/// Same draws as above, but the named entries keep their nominal values.
DhTable perturb_dh(const DhTable& nominal, double linear_range, double angular_range, std::uint64_t seed,
                   std::span<const std::string> frozen);

LaserExtrinsics perturb_extrinsics(const LaserExtrinsics& nominal, double linear_range, double angular_range,
                                   std::uint64_t seed);

/// Damped least squares on the 6-DOF pose error, analytic geometric Jacobian.
JointVector numerical_ik(const DhTable& table, const RigidTransform& target, const JointVector& seed_joints,
                         const IkOptions& options = {});

/// Scans of the first `plane_count` truth plates, N poses each, M points per pose.
std::vector<ScanRecord> generate_scan_dataset(const GroundTruth& truth, std::size_t plane_count,
                                              std::size_t poses_per_plane, std::size_t points_per_pose,
                                              const NoiseModel& noise, std::uint64_t seed,
                                              const ScanGeometry& geometry = {});

/// L hole-pair touches: same flange orientation, tips exactly D apart under truth.
std::vector<HolePairRecord> generate_hole_dataset(const GroundTruth& truth, std::size_t pair_count,
                                                  std::uint64_t seed, double touch_sigma = 0.0);

/**
 * @brief One hole pair from a given first configuration.
 *
 * The second flange orientation is the first one rotated by `drift` (a
 * rotation vector in the flange frame); zero drift is the nominal procedure.
 */
HolePairRecord make_hole_pair(const GroundTruth& truth, const JointVector& first, const Vec3& direction,
                              const Vec3& drift = Vec3::Zero(), std::size_t location_index = 0);

/// Equal-orientation pose pair whose flange separation is measured by an external oracle.
struct OraclePosePair {
  JointVector first = JointVector::Zero();
  JointVector second = JointVector::Zero();
};

std::vector<OraclePosePair> generate_oracle_pairs(const GroundTruth& truth, std::size_t count, std::uint64_t seed);

enum class Split { Calibration, Validation };

struct SimulationConfig {
  std::uint64_t seed = 1;
  std::size_t plane_count = 2;
  std::size_t poses_per_plane = 50;
  std::size_t points_per_pose = 40;
  std::size_t hole_pairs = 50;
  std::size_t calibration_pairs = 15;
  double scan_calibration_fraction = 0.6;
  std::size_t oracle_pairs = 50;
  double distance = 0.5;
  NoiseModel noise{1e-4, 0.0, 5e-3, 0.0, 0};
  double dh_linear_error = 2e-3;
  double dh_angular_error = 3.14159265358979323846 / 180.0;
  double laser_linear_error = 2e-3;
  double laser_angular_error = 3.14159265358979323846 / 180.0;
  DhTable nominal_dh{};
  LaserExtrinsics nominal_ext;
  ToolOffset tool;
  std::vector<PlaneParams> planes;
  ScanGeometry geometry;

  /// Denso nominal model, CAD laser mounting, default plates and tool.
  static SimulationConfig defaults();
  /// Throws InvalidInput naming the first offending field.
  void validate() const;
};

/// The plate locations used by default (three, so that K = 3 is available).
std::vector<PlaneParams> default_plates();

struct SyntheticDataset {
  std::uint64_t seed = 0;
  std::size_t plane_count = 0;
  std::vector<ScanRecord> scans;
  std::vector<Split> scan_splits;
  std::vector<HolePairRecord> hole_pairs;
  std::vector<Split> pair_splits;
  DhTable nominal_dh{};
  LaserExtrinsics nominal_ext;
  ToolOffset tool_nominal;
  double distance = 0.5;
  std::optional<GroundTruth> truth;
  std::vector<OraclePosePair> oracle_pairs;

  std::vector<ScanRecord> scans_in(Split split) const;
  std::vector<HolePairRecord> pairs_in(Split split) const;
  /// Scans restricted to the given plates (0-based) with indices kept.
  SyntheticDataset restricted_to_planes(std::size_t plane_count) const;
};

/// Full synthetic experiment: truth = nominal perturbed (fixed entries untouched).
SyntheticDataset simulate(const SimulationConfig& config);

}  // namespace lrfcal
