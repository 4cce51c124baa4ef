#pragma once

#include "lrfcal/calibration.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace lrfcal {

// File units: millimeters and degrees for DH entries and positions, radians
// for the axis-angle magnitude and for joint values. Plate and location
// indices are 1-based in files.

using Json = nlohmann::ordered_json;

Json dh_to_json(const DhTable& table);
DhTable dh_from_json(const Json& j);

Json extrinsics_to_json(const LaserExtrinsics& ext);
LaserExtrinsics extrinsics_from_json(const Json& j);

Json planes_to_json(const std::vector<PlaneParams>& planes);
std::vector<PlaneParams> planes_from_json(const Json& j);

Json params_to_json(const CalibrationParams& params);
CalibrationParams params_from_json(const Json& j);

/// The parameters exactly as they read back after a trip through the file format.
CalibrationParams file_round_trip(const CalibrationParams& params);

Json dataset_to_json(const SyntheticDataset& dataset);
/// Throws InvalidInput with the offending key on schema errors.
SyntheticDataset dataset_from_json(const Json& j);

/// Recognized keys mirror SimulationConfig; missing keys keep their defaults.
SimulationConfig config_from_json(const Json& j);

Json summary_to_json(const ErrorSummary& s);
Json validation_to_json(const ValidationSummary& v);

Json report_to_json(const CalibrationOutcome& outcome);
/// Calibrated parameters of a report written by report_to_json().
CalibrationParams report_parameters(const Json& report);

Json identifiability_to_json(const IdentifiabilityReport& report);
std::string identifiability_table(const IdentifiabilityReport& report);

/// Parameter, unit, initial and calibrated columns (plus truth when known).
std::string parameter_table_csv(const CalibrationOutcome& outcome, const std::optional<GroundTruth>& truth);
std::string validation_csv(const ValidationSummary& v);
std::string sweep_csv(std::span<const SweepRow> rows);
std::string comparison_csv(std::span<const ComparisonRow> rows);

/// Throws InvalidInput if the file is missing or is not valid JSON.
Json read_json_file(const std::filesystem::path& path);
/// Write to a sibling temporary file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace lrfcal
