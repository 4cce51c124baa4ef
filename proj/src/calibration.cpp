#include "lrfcal/calibration.hpp"

#include "lrfcal/dataset_io.hpp"
#include "lrfcal/errors.hpp"

#include <cmath>
#include <numbers>

namespace lrfcal {

std::string_view to_string(Mode mode) { return mode == Mode::Scalar ? "scalar" : "scalar-alpha"; }

Mode parse_mode(std::string_view text) {
  if (text == "scalar") return Mode::Scalar;
  if (text == "scalar-alpha") return Mode::ScalarAlpha;
  throw InvalidInput("mode must be 'scalar' or 'scalar-alpha', got '" + std::string(text) + "'");
}

std::vector<ScanRecord> filter_scans(std::span<const ScanRecord> scans, const RansacOptions& options) {
  std::vector<ScanRecord> out;
  out.reserve(scans.size());
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const ScanRecord& rec = scans[i];
    if (rec.points.size() < 2) continue;
    RansacOptions o = options;
    o.seed = options.seed + i;
    std::vector<std::size_t> keep;
    try {
      keep = ransac_line_filter(rec.points, o);
    } catch (const DegenerateProfile&) {
      continue;
    }
    ScanRecord filtered{rec.plane_index, rec.joints, {}};
    filtered.points.reserve(keep.size());
    for (auto k : keep) filtered.points.push_back(rec.points[k]);
    out.push_back(std::move(filtered));
  }
  return out;
}

CalibrationParams initial_parameters(std::span<const ScanRecord> scans, std::size_t plane_count,
                                     const DhTable& start_dh, const LaserExtrinsics& seed_ext) {
  if (plane_count == 0) throw InvalidInput("initial_parameters: plane_count must be >= 1");
  std::vector<ScanRecord> first;
  for (const auto& r : scans) {
    if (r.plane_index == 0) first.push_back(r);
  }
  if (first.empty()) throw EmptyInput("initial_parameters: no scans of plate 1");

  CalibrationParams p;
  p.dh = start_dh;
  p.ext = initial_extrinsics_linear(first, start_dh, seed_ext);
  const RigidTransform laser = p.ext.transform();
  for (std::size_t k = 0; k < plane_count; ++k) {
    std::vector<Vec3> mapped;
    for (const auto& r : scans) {
      if (r.plane_index != k) continue;
      const RigidTransform pose = forward_kinematics(start_dh, r.joints) * laser;
      for (const auto& pt : r.points) mapped.push_back(pose.apply(embed(pt)));
    }
    if (mapped.size() < 3) throw EmptyInput("initial_parameters: plate " + std::to_string(k + 1) + " has no scans");
    p.planes.push_back(fit_plane(mapped));
  }
  return p;
}

namespace {

Eigen::VectorXd mode_residuals(const CalibrationParams& params, std::span<const ScanRecord> scans,
                               std::span<const HolePairRecord> pairs, const SyntheticDataset& ds, Mode mode,
                               double weight) {
  if (mode == Mode::ScalarAlpha) return planar_residuals(params, scans);
  return scalar_residuals(params, scans, pairs, ds.tool_nominal, ds.distance, weight);
}

}  // namespace

CalibrationOutcome calibrate(const SyntheticDataset& dataset, const RunConfig& config,
                             const std::optional<DhTable>& start_dh) {
  if (!(config.weight >= 0.0) || !std::isfinite(config.weight)) throw InvalidInput("weight must be finite and >= 0");
  const std::vector<ScanRecord> raw = dataset.scans_in(Split::Calibration);
  const std::vector<ScanRecord> scans = config.filter_outliers ? filter_scans(raw, config.ransac) : raw;
  const std::vector<HolePairRecord> pairs =
      config.mode == Mode::Scalar ? dataset.pairs_in(Split::Calibration) : std::vector<HolePairRecord>{};
  if (scans.empty()) throw EmptyInput("calibrate: calibration split has no scans");

  CalibrationOutcome out;
  out.mode = config.mode;
  out.weight = config.weight;
  out.fixed = config.fixed;
  out.initial = initial_parameters(scans, dataset.plane_count, start_dh.value_or(dataset.nominal_dh),
                                   dataset.nominal_ext);

  const ParameterMask mask = ParameterMask::with_fixed(dataset.plane_count, config.fixed);
  const PackedParameters packed = pack_parameters(out.initial, mask);
  const PackContext& ctx = packed.context;

  const ResidualFunction f = [&](const Eigen::VectorXd& x) {
    return mode_residuals(unpack_parameters(x, ctx), scans, pairs, dataset, config.mode, config.weight);
  };
  const DomainPredicate feasible = [&](const Eigen::VectorXd& x) { return in_domain(x, ctx); };

  try {
    out.fit = levenberg_marquardt(f, packed.free, config.solver, feasible);
    out.calibrated = file_round_trip(unpack_parameters(out.fit.solution, ctx));
  } catch (const CalibrationError& e) {
    out.failure = e.what();
    out.fit = FitResult{};
    out.fit.solution = packed.free;
    out.fit.residual_history = {f(packed.free).squaredNorm()};
    out.fit.converged = false;
    out.calibrated = file_round_trip(out.initial);
  }
  out.final_cost =
      mode_residuals(out.calibrated, scans, pairs, dataset, config.mode, config.weight).squaredNorm();
  out.validation = validate(dataset, out.calibrated, config.ransac, config.filter_outliers);
  return out;
}

ValidationSummary validate(const SyntheticDataset& dataset, const CalibrationParams& params,
                           const RansacOptions& ransac, bool filter_outliers) {
  ValidationSummary v;
  const std::vector<ScanRecord> raw = dataset.scans_in(Split::Validation);
  const std::vector<ScanRecord> scans = filter_outliers ? filter_scans(raw, ransac) : raw;
  const std::vector<double> dp = planar_errors(params, scans);
  if (!dp.empty()) v.planar = summarize(dp);

  const std::vector<HolePairRecord> pairs = dataset.pairs_in(Split::Validation);
  if (!pairs.empty()) {
    v.tooltip = summarize(tooltip_distance_errors(params.dh, pairs, dataset.tool_nominal, dataset.distance));
  }
  if (dataset.truth && !dataset.oracle_pairs.empty()) {
    v.oracle = summarize(oracle_distance_errors(params.dh, dataset.truth->dh, dataset.oracle_pairs));
  }
  return v;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("log_grid: need 0 < lo < hi");
  if (count < 2) throw InvalidInput("log_grid: need at least 2 points");
  std::vector<double> out(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<SweepRow> sweep_weight(const SyntheticDataset& dataset, const RunConfig& base,
                                   std::span<const double> weights) {
  std::vector<SweepRow> rows;
  for (double w : weights) {
    RunConfig cfg = base;
    cfg.mode = Mode::Scalar;
    cfg.weight = w;
    const CalibrationOutcome o = calibrate(dataset, cfg);
    rows.push_back({w, o.validation, o.fit.iterations});
  }
  return rows;
}

std::vector<ComparisonRow> compare_methods(const SyntheticDataset& dataset, const RunConfig& base,
                                           std::uint64_t noisy_seed) {
  const DhTable noisy =
      perturb_dh(dataset.nominal_dh, 2e-3, std::numbers::pi / 180.0, noisy_seed, base.fixed);

  RunConfig dh_frozen = base;
  dh_frozen.mode = Mode::ScalarAlpha;
  dh_frozen.fixed.clear();
  for (std::size_t j = 0; j < kJointCount; ++j) {
    for (std::size_t f = 0; f < 4; ++f) dh_frozen.fixed.push_back(dh_entry_name(j, f));
  }
  RunConfig alpha = base;
  alpha.mode = Mode::ScalarAlpha;
  RunConfig scalar = base;
  scalar.mode = Mode::Scalar;

  std::vector<ComparisonRow> rows;
  rows.push_back({"Nominal", calibrate(dataset, dh_frozen, dataset.nominal_dh).validation});
  rows.push_back({"Noisy", calibrate(dataset, dh_frozen, noisy).validation});
  rows.push_back({"SCALAR_alpha", calibrate(dataset, alpha, noisy).validation});
  rows.push_back({"SCALAR", calibrate(dataset, scalar, noisy).validation});
  return rows;
}

}  // namespace lrfcal
