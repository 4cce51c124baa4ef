#pragma once

#include "lrfcal/identifiability.hpp"
#include "lrfcal/metrics.hpp"
#include "lrfcal/simulator.hpp"
#include "lrfcal/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lrfcal {

/// scalar: planar + weighted distance terms; scalar-alpha: planar terms only.
enum class Mode { Scalar, ScalarAlpha };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

inline constexpr double kDefaultWeight = 0.31;

struct RunConfig {
  Mode mode = Mode::Scalar;
  double weight = kDefaultWeight;
  std::vector<std::string> fixed = default_fixed_names();
  SolverOptions solver;
  RansacOptions ransac;
  bool filter_outliers = true;
};

struct ValidationSummary {
  std::optional<ErrorSummary> planar;
  std::optional<ErrorSummary> tooltip;
  std::optional<ErrorSummary> oracle;
};

struct CalibrationOutcome {
  Mode mode = Mode::Scalar;
  double weight = 0.0;
  std::vector<std::string> fixed;
  CalibrationParams initial;
  CalibrationParams calibrated;
  FitResult fit;
  /// Sum of squares of scalar_residuals at `calibrated` on the calibration split.
  double final_cost = 0.0;
  ValidationSummary validation;
  /// Non-empty when the solver threw; `calibrated` then holds the starting point.
  std::string failure;
};

/// Drops RANSAC outliers from every record; records left with < 2 points are removed.
std::vector<ScanRecord> filter_scans(std::span<const ScanRecord> scans, const RansacOptions& options);

/**
 * @brief Starting point for the optimizer.
 *
 * Laser pose bootstrapped from the first plate's scans, then each plate fit
 * to its points mapped through (start_dh, bootstrapped laser).
 */
CalibrationParams initial_parameters(std::span<const ScanRecord> scans, std::size_t plane_count,
                                     const DhTable& start_dh, const LaserExtrinsics& seed_ext);

/// LM on the calibration split; `start_dh` defaults to the dataset's nominal table.
CalibrationOutcome calibrate(const SyntheticDataset& dataset, const RunConfig& config,
                             const std::optional<DhTable>& start_dh = std::nullopt);

/// δ_p on validation scans, δ_t on validation pairs, δ_f on oracle pairs (needs truth).
ValidationSummary validate(const SyntheticDataset& dataset, const CalibrationParams& params,
                           const RansacOptions& ransac = {}, bool filter_outliers = true);

struct SweepRow {
  double weight = 0.0;
  ValidationSummary validation;
  int iterations = 0;
};

std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<SweepRow> sweep_weight(const SyntheticDataset& dataset, const RunConfig& base, std::span<const double> weights);

struct ComparisonRow {
  std::string label;
  ValidationSummary validation;
};

/**
 * @brief Nominal DH / Noisy DH / SCALAR_alpha / SCALAR, each validated on the same split.
 *
 * The first two hold the DH table fixed and fit only laser and plates; the
 * last two start from the noisy table.
 */
std::vector<ComparisonRow> compare_methods(const SyntheticDataset& dataset, const RunConfig& base,
                                           std::uint64_t noisy_seed);

}  // namespace lrfcal
