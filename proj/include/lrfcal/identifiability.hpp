#pragma once

#include "lrfcal/objective.hpp"

#include <set>
#include <string>
#include <vector>

namespace lrfcal {

struct IdentifiabilityReport {
  std::vector<std::string> parameter_names;  // column labels of the analyzed Jacobian
  std::vector<double> singular_values;       // descending
  double tolerance_ratio = 0.0;
  std::size_t numerical_rank = 0;
  std::size_t nullity = 0;
  /// One entry per null direction after reduction to a sparse (echelon) basis.
  std::vector<std::vector<std::string>> dependent_groups;
  Eigen::MatrixXd null_space;  // columns are orthonormal null directions

  /// Union of all group members.
  std::set<std::string> dependent_parameters() const;
};

struct JacobianOptions {
  double fd_step = 1e-7;
  /// Append sqrt(w)-scaled distance rows (same identifiable set, per the planar-only analysis).
  bool include_distance_rows = false;
  std::span<const HolePairRecord> pairs{};
  ToolOffset tool{};
  double distance = 0.5;
  double weight = 1.0;
};

/**
 * @brief d(planar residual)/d(parameter) by central differences.
 *
 * Columns follow the canonical layout minus the dependent entries (rz and
 * every nkz), i.e. 36 columns for two plates.
 */
Eigen::MatrixXd identification_jacobian(const CalibrationParams& params, std::span<const ScanRecord> scans,
                                        const JacobianOptions& options = {});

/// Column labels matching identification_jacobian().
std::vector<std::string> identification_parameter_names(std::size_t planes);

IdentifiabilityReport identifiability_analysis(const Eigen::MatrixXd& jacobian,
                                               const std::vector<std::string>& names,
                                               double tolerance_ratio = 1e-8, double group_threshold = 0.05);

/// One representative per dependent set, held at its model value during calibration.
std::vector<std::string> default_fixed_names();

/// Drops the named columns from an identification Jacobian.
Eigen::MatrixXd drop_columns(const Eigen::MatrixXd& jacobian, const std::vector<std::string>& names,
                             const std::vector<std::string>& drop, std::vector<std::string>* kept = nullptr);

}  // namespace lrfcal
