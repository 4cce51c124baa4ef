#include "lrfcal/cli.hpp"

#include "lrfcal/dataset_io.hpp"
#include "lrfcal/errors.hpp"

#include "CLI11.hpp"

#include <ostream>

namespace lrfcal {

namespace {

struct Options {
  std::string config;
  std::string dataset;
  std::string out;
  std::string csv;
  std::string params;
  std::string mode = "scalar";
  double weight = kDefaultWeight;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> fix;
  bool fix_given = false;
  double tolerance = 1e-8;
  double w_min = 1e-2;
  double w_max = 1e1;
  std::size_t w_count = 13;
};

SyntheticDataset load_dataset(const std::string& path) { return dataset_from_json(read_json_file(path)); }

RunConfig run_config(const Options& o) {
  RunConfig rc;
  rc.mode = parse_mode(o.mode);
  rc.weight = o.weight;
  if (o.fix_given) rc.fixed = o.fix;
  if (o.seed) rc.ransac.seed = *o.seed;
  return rc;
}

std::filesystem::path sibling(const std::string& out, const char* ext) {
  std::filesystem::path p(out);
  p.replace_extension(ext);
  return p;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SimulationConfig cfg = o.config.empty() ? SimulationConfig::defaults() : config_from_json(read_json_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  SyntheticDataset ds;
  try {
    ds = simulate(cfg);
  } catch (const PoseSamplingExhausted& e) {
    throw std::runtime_error(std::string("generation failed: ") + e.what());
  } catch (const IkNoConvergence& e) {
    throw std::runtime_error(std::string("generation failed: ") + e.what());
  }
  write_json_file(o.out, dataset_to_json(ds));
  out << "wrote " << ds.scans.size() << " scan records and " << ds.hole_pairs.size() << " hole pairs to " << o.out
      << "\n";
  return kExitOk;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  const SyntheticDataset ds = load_dataset(o.dataset);
  const CalibrationOutcome outcome = calibrate(ds, run_config(o));
  write_json_file(o.out, report_to_json(outcome));
  write_file_atomic(o.csv.empty() ? sibling(o.out, ".csv") : std::filesystem::path(o.csv),
                    parameter_table_csv(outcome, ds.truth));
  if (!outcome.failure.empty() || !outcome.fit.converged) {
    err << "error: solver did not converge"
        << (outcome.failure.empty() ? std::string() : ": " + outcome.failure) << "\n";
    return kExitSolver;
  }
  out << "converged in " << outcome.fit.iterations << " iterations ("
      << to_string(outcome.fit.termination_reason) << "), final cost " << outcome.final_cost << " m^2\n";
  return kExitOk;
}

int cmd_identify(const Options& o, std::ostream& out) {
  const SyntheticDataset ds = load_dataset(o.dataset);
  const std::vector<ScanRecord> scans = filter_scans(ds.scans, RansacOptions{});
  const CalibrationParams p = initial_parameters(scans, ds.plane_count, ds.nominal_dh, ds.nominal_ext);
  const Eigen::MatrixXd jac = identification_jacobian(p, scans);
  const auto names = identification_parameter_names(ds.plane_count);
  const IdentifiabilityReport full = identifiability_analysis(jac, names, o.tolerance);

  const std::vector<std::string> fixed = o.fix_given ? o.fix : default_fixed_names();
  std::vector<std::string> kept;
  const Eigen::MatrixXd reduced_jac = drop_columns(jac, names, fixed, &kept);
  const IdentifiabilityReport reduced = identifiability_analysis(reduced_jac, kept, o.tolerance);

  Json j;
  j["full"] = identifiability_to_json(full);
  j["fixed"] = fixed;
  j["reduced"] = identifiability_to_json(reduced);
  write_json_file(o.out, j);
  write_file_atomic(sibling(o.out, ".txt"),
                    identifiability_table(full) + "\nwith fixed parameters removed:\n" + identifiability_table(reduced));
  out << "nullity " << full.nullity << " (rank " << full.numerical_rank << " of " << names.size()
      << "); after fixing: " << reduced.nullity << "\n";
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const SyntheticDataset ds = load_dataset(o.dataset);
  CalibrationParams p;
  if (o.params == "truth") {
    if (!ds.truth) throw InvalidInput("--params truth: dataset has no truth section");
    p = {ds.truth->dh, ds.truth->ext,
         {ds.truth->planes.begin(), ds.truth->planes.begin() + static_cast<std::ptrdiff_t>(ds.plane_count)}};
  } else if (o.params == "nominal") {
    const auto scans = filter_scans(ds.scans_in(Split::Calibration), RansacOptions{});
    p = initial_parameters(scans, ds.plane_count, ds.nominal_dh, ds.nominal_ext);
  } else {
    p = report_parameters(read_json_file(o.params));
  }
  if (p.planes.size() != ds.plane_count) throw InvalidInput("--params: plate count does not match the dataset");
  const ValidationSummary v = validate(ds, p);
  write_file_atomic(o.out, validation_csv(v));
  out << validation_csv(v);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const SyntheticDataset ds = load_dataset(o.dataset);
  const auto grid = log_grid(o.w_min, o.w_max, o.w_count);
  const auto rows = sweep_weight(ds, run_config(o), grid);
  write_file_atomic(o.out, sweep_csv(rows));
  out << sweep_csv(rows);
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const SyntheticDataset ds = load_dataset(o.dataset);
  const auto rows = compare_methods(ds, run_config(o), o.seed.value_or(ds.seed + 1));
  write_file_atomic(o.out, comparison_csv(rows));
  out << comparison_csv(rows);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robot kinematics and laser extrinsics calibration from planar and distance constraints", "lrfcal"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* c, const char* help) {
    c->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { o.seed = s; }, help);
  };
  auto add_fix = [&](CLI::App* c) {
    c->add_option_function<std::vector<std::string>>(
         "--fix", [&](const std::vector<std::string>& v) { o.fix = v; o.fix_given = true; },
         "Parameters held at their model values (comma separated)")
        ->delimiter(',');
  };
  auto add_run = [&](CLI::App* c) {
    c->add_option("--mode", o.mode, "scalar | scalar-alpha")->check(CLI::IsMember({"scalar", "scalar-alpha"}));
    c->add_option("--weight", o.weight, "Weight of the distance terms");
    add_fix(c);
  };

  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim->add_option("--config", o.config, "Simulation config JSON (defaults if omitted)");
  sim->add_option("--out", o.out, "Dataset JSON to write")->required();
  add_seed(sim, "Override the config seed");

  CLI::App* cal = app.add_subcommand("calibrate", "Calibrate DH, laser and plates");
  cal->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  cal->add_option("--out", o.out, "Report JSON to write")->required();
  cal->add_option("--csv", o.csv, "Parameter table CSV (default: next to the report)");
  add_run(cal);
  add_seed(cal, "RANSAC seed");

  CLI::App* idf = app.add_subcommand("identify", "Identifiability analysis of the planar constraints");
  idf->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  idf->add_option("--out", o.out, "Report JSON to write")->required();
  idf->add_option("--tolerance", o.tolerance, "Rank threshold relative to the largest singular value");
  add_fix(idf);

  CLI::App* val = app.add_subcommand("validate", "Validation errors for a parameter set");
  val->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  val->add_option("--params", o.params, "Calibration report JSON, or 'truth' / 'nominal'")->required();
  val->add_option("--out", o.out, "CSV to write")->required();

  CLI::App* sweep = app.add_subcommand("sweep-w", "Validation errors over a log grid of weights");
  sweep->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  sweep->add_option("--out", o.out, "CSV to write")->required();
  sweep->add_option("--w-min", o.w_min, "Smallest weight");
  sweep->add_option("--w-max", o.w_max, "Largest weight");
  sweep->add_option("--w-count", o.w_count, "Grid points");
  add_fix(sweep);
  add_seed(sweep, "RANSAC seed");

  CLI::App* cmp = app.add_subcommand("compare", "Nominal / Noisy / SCALAR_alpha / SCALAR comparison");
  cmp->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  cmp->add_option("--out", o.out, "CSV to write")->required();
  cmp->add_option("--weight", o.weight, "Weight of the distance terms");
  add_fix(cmp);
  add_seed(cmp, "Seed of the noisy DH table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (cal->parsed()) return cmd_calibrate(o, out, err);
    if (idf->parsed()) return cmd_identify(o, out);
    if (val->parsed()) return cmd_validate(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MaskConflict& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EmptyInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << "\n";
    return sim->parsed() ? kExitGeneration : kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return sim->parsed() ? kExitGeneration : kExitSolver;
  }
  return kExitConfig;
}

}  // namespace lrfcal
