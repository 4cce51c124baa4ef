#include "lrfcal/dataset_io.hpp"

#include "lrfcal/errors.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lrfcal {

namespace {

constexpr double kMm = 1e3;
constexpr double kDeg = 180.0 / std::numbers::pi;

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  throw InvalidInput(where + ": " + why);
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, "missing key '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  return v.get<double>();
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) bad(where, "expected a number");
  return v.get<double>();
}

std::size_t count_field(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
  if (v.get<std::int64_t>() < 0) bad(where + "." + key, "must be >= 0");
  return v.get<std::size_t>();
}

Json joints_to_json(const JointVector& q) {
  Json a = Json::array();
  for (int i = 0; i < 6; ++i) a.push_back(q(i));
  return a;
}

JointVector joints_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 6) bad(where, "expected 6 joint values");
  JointVector q;
  for (int i = 0; i < 6; ++i) q(i) = number(j[static_cast<std::size_t>(i)], where);
  return q;
}

Json vec3_mm(const Vec3& v) { return Json::array({v.x() * kMm, v.y() * kMm, v.z() * kMm}); }

Vec3 vec3_from_mm(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where, "expected 3 values");
  return Vec3(number(j[0], where), number(j[1], where), number(j[2], where)) / kMm;
}

std::string split_name(Split s) { return s == Split::Calibration ? "calibration" : "validation"; }

Split split_from_json(const Json& j, const std::string& where) {
  if (j == "calibration") return Split::Calibration;
  if (j == "validation") return Split::Validation;
  bad(where, "split must be 'calibration' or 'validation'");
}

std::size_t one_based(const Json& j, const std::string& key, const std::string& where) {
  const std::size_t v = count_field(j, key, where);
  if (v < 1) bad(where + "." + key, "indices are 1-based");
  return v - 1;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

Json truth_to_json(const GroundTruth& t) {
  Json j;
  j["dh"] = dh_to_json(t.dh);
  j["extrinsics"] = extrinsics_to_json(t.ext);
  j["tool"] = vec3_mm(t.tool.t);
  j["D"] = t.distance * kMm;
  j["planes"] = planes_to_json(t.planes);
  return j;
}

}  // namespace

Json dh_to_json(const DhTable& table) {
  Json a = Json::array();
  for (const auto& r : table) {
    Json row;
    row["a"] = r.a * kMm;
    row["alpha"] = r.alpha * kDeg;
    row["theta"] = r.theta * kDeg;
    row["d"] = r.d * kMm;
    a.push_back(row);
  }
  return a;
}

DhTable dh_from_json(const Json& j) {
  if (!j.is_array() || j.size() != kJointCount) bad("dh", "expected 6 rows");
  DhTable t{};
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const std::string where = "dh[" + std::to_string(i) + "]";
    t[i].a = number(j[i], "a", where) / kMm;
    t[i].alpha = number(j[i], "alpha", where) / kDeg;
    t[i].theta = number(j[i], "theta", where) / kDeg;
    t[i].d = number(j[i], "d", where) / kMm;
  }
  return t;
}

Json extrinsics_to_json(const LaserExtrinsics& ext) {
  Json j;
  j["rx"] = ext.axis.x();
  j["ry"] = ext.axis.y();
  j["rz"] = ext.axis.z();
  j["rw"] = ext.angle;
  j["px"] = ext.position.x() * kMm;
  j["py"] = ext.position.y() * kMm;
  j["pz"] = ext.position.z() * kMm;
  return j;
}

LaserExtrinsics extrinsics_from_json(const Json& j) {
  const std::string w = "extrinsics";
  const Vec3 pos(number(j, "px", w), number(j, "py", w), number(j, "pz", w));
  try {
    return LaserExtrinsics::from_components(number(j, "rx", w), number(j, "ry", w), number(j, "rw", w), pos / kMm);
  } catch (const OutOfDomain& e) {
    bad(w, e.what());
  }
}

Json planes_to_json(const std::vector<PlaneParams>& planes) {
  Json a = Json::array();
  for (const auto& p : planes) {
    Json row;
    row["nx"] = p.normal.x();
    row["ny"] = p.normal.y();
    row["nz"] = p.normal.z();
    row["l"] = p.offset * kMm;
    a.push_back(row);
  }
  return a;
}

std::vector<PlaneParams> planes_from_json(const Json& j) {
  if (!j.is_array()) bad("planes", "expected an array");
  std::vector<PlaneParams> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "planes[" + std::to_string(i) + "]";
    try {
      out.push_back(PlaneParams::from_components(number(j[i], "nx", where), number(j[i], "ny", where),
                                                 number(j[i], "l", where) / kMm));
    } catch (const OutOfDomain& e) {
      bad(where, e.what());
    }
  }
  return out;
}

Json params_to_json(const CalibrationParams& params) {
  Json j;
  j["dh"] = dh_to_json(params.dh);
  j["extrinsics"] = extrinsics_to_json(params.ext);
  j["planes"] = planes_to_json(params.planes);
  return j;
}

CalibrationParams params_from_json(const Json& j) {
  CalibrationParams p;
  p.dh = dh_from_json(member(j, "dh", "parameters"));
  p.ext = extrinsics_from_json(member(j, "extrinsics", "parameters"));
  p.planes = planes_from_json(member(j, "planes", "parameters"));
  return p;
}

CalibrationParams file_round_trip(const CalibrationParams& params) { return params_from_json(params_to_json(params)); }

Json dataset_to_json(const SyntheticDataset& ds) {
  std::size_t points = 0;
  for (const auto& s : ds.scans) points += s.points.size();

  Json j;
  Json& meta = j["meta"];
  meta["format"] = "lrfcal-dataset";
  meta["version"] = 1;
  meta["units"] = {{"length", "mm"}, {"dh_angle", "deg"}, {"axis_angle", "rad"}, {"joints", "rad"}};
  meta["seed"] = ds.seed;
  meta["counts"] = {{"planes", ds.plane_count},
                    {"scans", ds.scans.size()},
                    {"points", points},
                    {"hole_pairs", ds.hole_pairs.size()},
                    {"oracle_pairs", ds.oracle_pairs.size()}};

  Json& nominal = j["nominal"];
  nominal["dh"] = dh_to_json(ds.nominal_dh);
  nominal["extrinsics"] = extrinsics_to_json(ds.nominal_ext);
  nominal["tool"] = vec3_mm(ds.tool_nominal.t);
  nominal["D"] = ds.distance * kMm;

  if (ds.truth) j["truth"] = truth_to_json(*ds.truth);

  Json scans = Json::array();
  for (std::size_t i = 0; i < ds.scans.size(); ++i) {
    const ScanRecord& r = ds.scans[i];
    Json pts = Json::array();
    for (const auto& p : r.points) pts.push_back(Json::array({p.u * kMm, p.w * kMm}));
    Json s;
    s["plane"] = r.plane_index + 1;
    s["split"] = split_name(ds.scan_splits[i]);
    s["joints"] = joints_to_json(r.joints);
    s["points"] = std::move(pts);
    scans.push_back(std::move(s));
  }
  j["scans"] = std::move(scans);

  Json pairs = Json::array();
  for (std::size_t i = 0; i < ds.hole_pairs.size(); ++i) {
    const HolePairRecord& p = ds.hole_pairs[i];
    Json h;
    h["location"] = p.location_index + 1;
    h["split"] = split_name(ds.pair_splits[i]);
    h["joints_first"] = joints_to_json(p.joints_first);
    h["joints_second"] = joints_to_json(p.joints_second);
    pairs.push_back(std::move(h));
  }
  j["hole_pairs"] = std::move(pairs);

  Json oracle = Json::array();
  for (const auto& p : ds.oracle_pairs) {
    oracle.push_back({{"joints_first", joints_to_json(p.first)}, {"joints_second", joints_to_json(p.second)}});
  }
  j["oracle_pairs"] = std::move(oracle);
  return j;
}

SyntheticDataset dataset_from_json(const Json& j) {
  SyntheticDataset ds;
  const Json& meta = member(j, "meta", "dataset");
  ds.seed = count_field(meta, "seed", "meta");
  ds.plane_count = count_field(member(meta, "counts", "meta"), "planes", "meta.counts");
  if (ds.plane_count < 1) bad("meta.counts.planes", "must be >= 1");

  const Json& nominal = member(j, "nominal", "dataset");
  ds.nominal_dh = dh_from_json(member(nominal, "dh", "nominal"));
  ds.nominal_ext = extrinsics_from_json(member(nominal, "extrinsics", "nominal"));
  ds.tool_nominal.t = vec3_from_mm(member(nominal, "tool", "nominal"), "nominal.tool");
  ds.distance = number(nominal, "D", "nominal") / kMm;
  if (!(ds.distance > 0.0)) bad("nominal.D", "must be positive");

  if (auto it = j.find("truth"); it != j.end()) {
    GroundTruth t;
    t.dh = dh_from_json(member(*it, "dh", "truth"));
    t.ext = extrinsics_from_json(member(*it, "extrinsics", "truth"));
    t.tool.t = vec3_from_mm(member(*it, "tool", "truth"), "truth.tool");
    t.distance = number(*it, "D", "truth") / kMm;
    t.planes = planes_from_json(member(*it, "planes", "truth"));
    ds.truth = std::move(t);
  }

  const Json& scans = member(j, "scans", "dataset");
  if (!scans.is_array()) bad("scans", "expected an array");
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const std::string where = "scans[" + std::to_string(i) + "]";
    ScanRecord r;
    r.plane_index = one_based(scans[i], "plane", where);
    if (r.plane_index >= ds.plane_count) bad(where + ".plane", "exceeds meta.counts.planes");
    r.joints = joints_from_json(member(scans[i], "joints", where), where + ".joints");
    const Json& pts = member(scans[i], "points", where);
    if (!pts.is_array()) bad(where + ".points", "expected an array");
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 2) bad(where + ".points", "expected [u, w] pairs");
      r.points.push_back({number(p[0], where + ".points") / kMm, number(p[1], where + ".points") / kMm});
    }
    ds.scan_splits.push_back(split_from_json(member(scans[i], "split", where), where + ".split"));
    ds.scans.push_back(std::move(r));
  }

  const Json& pairs = member(j, "hole_pairs", "dataset");
  if (!pairs.is_array()) bad("hole_pairs", "expected an array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string where = "hole_pairs[" + std::to_string(i) + "]";
    HolePairRecord h;
    h.location_index = one_based(pairs[i], "location", where);
    h.joints_first = joints_from_json(member(pairs[i], "joints_first", where), where + ".joints_first");
    h.joints_second = joints_from_json(member(pairs[i], "joints_second", where), where + ".joints_second");
    ds.pair_splits.push_back(split_from_json(member(pairs[i], "split", where), where + ".split"));
    ds.hole_pairs.push_back(h);
  }

  if (auto it = j.find("oracle_pairs"); it != j.end()) {
    if (!it->is_array()) bad("oracle_pairs", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "oracle_pairs[" + std::to_string(i) + "]";
      const Json& p = (*it)[i];
      ds.oracle_pairs.push_back({joints_from_json(member(p, "joints_first", where), where + ".joints_first"),
                                 joints_from_json(member(p, "joints_second", where), where + ".joints_second")});
    }
  }
  return ds;
}

SimulationConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad("config", "expected an object");
  static const std::vector<std::string> known = {
      "seed",     "plane_count", "poses_per_plane", "points_per_pose", "hole_pairs", "calibration_pairs",
      "scan_calibration_fraction", "oracle_pairs", "D", "noise", "perturbation", "tool", "nominal", "plates",
      "geometry"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw InvalidInput("config field '" + it.key() + "': unknown key");
    }
  }

  SimulationConfig c = SimulationConfig::defaults();
  auto field = [](const std::string& name) { return "config field '" + name + "'"; };
  auto count = [&](const char* key, std::size_t& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw InvalidInput(field(key) + ": must be a non-negative integer");
      }
      dst = it->get<std::size_t>();
    }
  };
  auto real = [&](const Json& obj, const std::string& prefix, const char* key, double& dst, double scale) {
    if (auto it = obj.find(key); it != obj.end()) {
      if (!it->is_number()) throw InvalidInput(field(prefix + key) + ": must be a number");
      dst = it->get<double>() / scale;
    }
  };

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw InvalidInput(field("seed") + ": must be a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  count("plane_count", c.plane_count);
  count("poses_per_plane", c.poses_per_plane);
  count("points_per_pose", c.points_per_pose);
  count("hole_pairs", c.hole_pairs);
  count("calibration_pairs", c.calibration_pairs);
  count("oracle_pairs", c.oracle_pairs);
  real(j, "", "scan_calibration_fraction", c.scan_calibration_fraction, 1.0);
  real(j, "", "D", c.distance, kMm);

  if (auto it = j.find("noise"); it != j.end()) {
    real(*it, "noise.", "laser_sigma", c.noise.laser_sigma, kMm);
    real(*it, "noise.", "outlier_rate", c.noise.outlier_rate, 1.0);
    real(*it, "noise.", "outlier_magnitude", c.noise.outlier_magnitude, kMm);
    real(*it, "noise.", "touch_sigma", c.noise.touch_sigma, kMm);
  }
  if (auto it = j.find("perturbation"); it != j.end()) {
    real(*it, "perturbation.", "dh_linear", c.dh_linear_error, kMm);
    real(*it, "perturbation.", "dh_angular", c.dh_angular_error, kDeg);
    real(*it, "perturbation.", "laser_linear", c.laser_linear_error, kMm);
    real(*it, "perturbation.", "laser_angular", c.laser_angular_error, kDeg);
  }
  if (auto it = j.find("geometry"); it != j.end()) {
    real(*it, "geometry.", "min_range", c.geometry.min_range, kMm);
    real(*it, "geometry.", "max_range", c.geometry.max_range, kMm);
    real(*it, "geometry.", "fan_half_angle", c.geometry.fan_half_angle, kDeg);
    real(*it, "geometry.", "max_incidence", c.geometry.max_incidence, kDeg);
    real(*it, "geometry.", "joint_range", c.geometry.joint_range, 1.0);
  }
  if (auto it = j.find("tool"); it != j.end()) c.tool.t = vec3_from_mm(*it, "config field 'tool'");
  if (auto it = j.find("nominal"); it != j.end()) {
    if (auto d = it->find("dh"); d != it->end()) c.nominal_dh = dh_from_json(*d);
    if (auto e = it->find("extrinsics"); e != it->end()) c.nominal_ext = extrinsics_from_json(*e);
  }
  if (auto it = j.find("plates"); it != j.end()) c.planes = planes_from_json(*it);
  return c;
}

Json summary_to_json(const ErrorSummary& s) {
  Json j;
  j["mean_mm"] = s.mean * kMm;
  j["std_mm"] = s.std * kMm;
  j["max_mm"] = s.max * kMm;
  j["count"] = s.count;
  return j;
}

Json validation_to_json(const ValidationSummary& v) {
  Json j = Json::object();
  if (v.planar) j["planar"] = summary_to_json(*v.planar);
  if (v.tooltip) j["tooltip"] = summary_to_json(*v.tooltip);
  if (v.oracle) j["oracle"] = summary_to_json(*v.oracle);
  return j;
}

Json report_to_json(const CalibrationOutcome& o) {
  Json j;
  j["format"] = "lrfcal-report";
  j["version"] = 1;
  j["mode"] = std::string(to_string(o.mode));
  j["weight"] = o.weight;
  j["fixed"] = o.fixed;
  Json& s = j["solver"];
  s["converged"] = o.fit.converged && o.failure.empty();
  s["termination"] = o.failure.empty() ? std::string(to_string(o.fit.termination_reason)) : "error";
  if (!o.failure.empty()) s["failure"] = o.failure;
  s["iterations"] = o.fit.iterations;
  s["residual_history_m2"] = o.fit.residual_history;
  s["final_cost_m2"] = o.final_cost;
  j["initial"] = params_to_json(o.initial);
  j["calibrated"] = params_to_json(o.calibrated);
  j["validation"] = validation_to_json(o.validation);
  return j;
}

CalibrationParams report_parameters(const Json& report) { return params_from_json(member(report, "calibrated", "report")); }

Json identifiability_to_json(const IdentifiabilityReport& r) {
  Json j;
  j["tolerance_ratio"] = r.tolerance_ratio;
  j["numerical_rank"] = r.numerical_rank;
  j["nullity"] = r.nullity;
  j["parameter_names"] = r.parameter_names;
  j["singular_values"] = r.singular_values;
  j["dependent_groups"] = r.dependent_groups;
  const auto deps = r.dependent_parameters();
  j["dependent_parameters"] = std::vector<std::string>(deps.begin(), deps.end());
  return j;
}

std::string identifiability_table(const IdentifiabilityReport& r) {
  std::ostringstream out;
  out << "parameters: " << r.parameter_names.size() << "\n";
  out << "rank: " << r.numerical_rank << "  nullity: " << r.nullity << "  (sigma > " << fmt(r.tolerance_ratio)
      << " * sigma_max)\n\n";
  out << "  #  singular value\n";
  for (std::size_t i = 0; i < r.singular_values.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof line, "%3zu  %.6e\n", i + 1, r.singular_values[i]);
    out << line;
  }
  out << "\ndependent groups:\n";
  for (std::size_t g = 0; g < r.dependent_groups.size(); ++g) {
    out << "  " << g + 1 << ":";
    for (const auto& n : r.dependent_groups[g]) out << " " << n;
    out << "\n";
  }
  return out.str();
}

std::string parameter_table_csv(const CalibrationOutcome& o, const std::optional<GroundTruth>& truth) {
  const std::size_t k = o.calibrated.planes.size();
  const auto names = parameter_names(k);
  const auto init = flatten(o.initial);
  const auto cal = flatten(o.calibrated);
  std::vector<double> tru;
  if (truth && truth->planes.size() >= k) {
    CalibrationParams t{truth->dh, truth->ext, {truth->planes.begin(), truth->planes.begin() + static_cast<std::ptrdiff_t>(k)}};
    tru = flatten(t);
  }
  const ParameterMask mask = ParameterMask::with_fixed(k, o.fixed);

  auto unit_of = [&](std::size_t i) -> std::pair<std::string, double> {
    if (i < kDhEntryCount) return is_angle_entry(i) ? std::pair{"deg", kDeg} : std::pair{"mm", kMm};
    if (i < kLaserOffset + 3) return {"", 1.0};
    if (i == kLaserOffset + 3) return {"rad", 1.0};
    if (i < kPlaneOffset) return {"mm", kMm};
    return (i - kPlaneOffset) % 4 == 3 ? std::pair{"mm", kMm} : std::pair{"", 1.0};
  };

  std::ostringstream out;
  out << "parameter,unit,role,initial,calibrated" << (tru.empty() ? "" : ",truth") << "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto [unit, scale] = unit_of(i);
    const ParamRole role = mask.roles()[i];
    const char* rname = role == ParamRole::Free ? "free" : role == ParamRole::Fixed ? "fixed" : "dependent";
    out << names[i] << "," << unit << "," << rname << "," << fmt(init[i] * scale) << "," << fmt(cal[i] * scale);
    if (!tru.empty()) out << "," << fmt(tru[i] * scale);
    out << "\n";
  }
  return out.str();
}

namespace {

void summary_cells(std::ostringstream& out, const std::optional<ErrorSummary>& s) {
  if (s) {
    out << "," << fmt(s->mean * kMm) << "," << fmt(s->std * kMm) << "," << fmt(s->max * kMm);
  } else {
    out << ",,,";
  }
}

}  // namespace

std::string validation_csv(const ValidationSummary& v) {
  std::ostringstream out;
  out << "metric,mean_mm,std_mm,max_mm,count\n";
  auto row = [&](const char* name, const std::optional<ErrorSummary>& s) {
    out << name;
    summary_cells(out, s);
    out << "," << (s ? std::to_string(s->count) : "0") << "\n";
  };
  row("planar", v.planar);
  row("tooltip_distance", v.tooltip);
  row("oracle_distance", v.oracle);
  return out.str();
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "weight,iterations,planar_mean_mm,tooltip_mean_mm,oracle_mean_mm\n";
  auto mean = [](const std::optional<ErrorSummary>& s) { return s ? fmt(s->mean * kMm) : std::string(); };
  for (const auto& r : rows) {
    out << fmt(r.weight) << "," << r.iterations << "," << mean(r.validation.planar) << ","
        << mean(r.validation.tooltip) << "," << mean(r.validation.oracle) << "\n";
  }
  return out.str();
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  out << "method,planar_mean_mm,planar_std_mm,planar_max_mm,tooltip_mean_mm,tooltip_std_mm,tooltip_max_mm,"
         "oracle_mean_mm,oracle_std_mm,oracle_max_mm\n";
  for (const auto& r : rows) {
    out << r.label;
    summary_cells(out, r.validation.planar);
    summary_cells(out, r.validation.tooltip);
    summary_cells(out, r.validation.oracle);
    out << "\n";
  }
  return out.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw InvalidInput("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

}  // namespace lrfcal
