#include "lrfcal/simulator.hpp"

#include "lrfcal/errors.hpp"
#include "lrfcal/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace lrfcal {

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

JointVector random_joints(Rng& rng, double range) {
  JointVector q;
  for (Eigen::Index i = 0; i < 6; ++i) q(i) = uniform(rng, -range, range);
  return q;
}

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

Vec3 rotation_vector(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

Mat3 exp_so3(const Vec3& w) {
  const double angle = w.norm();
  if (angle == 0.0) return Mat3::Identity();
  return axis_angle_matrix(w / angle, angle);
}

// Geometric Jacobian [v; ω] for the modified DH chain: joint i turns about
// z of frame i, whose origin lies on that axis.
Eigen::Matrix<double, 6, 6> geometric_jacobian(const DhTable& table, const JointVector& q, RigidTransform* flange) {
  std::array<RigidTransform, kJointCount> frames;
  RigidTransform pose;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    pose = pose * dh_transform(table[i], q(static_cast<Eigen::Index>(i)));
    frames[i] = pose;
  }
  Eigen::Matrix<double, 6, 6> jac;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const Vec3 z = frames[i].rotation.col(2);
    const auto c = static_cast<Eigen::Index>(i);
    jac.block<3, 1>(0, c) = z.cross(pose.translation - frames[i].translation);
    jac.block<3, 1>(3, c) = z;
  }
  *flange = pose;
  return jac;
}

Eigen::Matrix<double, 6, 1> pose_error(const RigidTransform& target, const RigidTransform& current) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.translation - current.translation;
  e.tail<3>() = rotation_vector(target.rotation * current.rotation.transpose());
  return e;
}

bool try_ik(const DhTable& table, const RigidTransform& target, const JointVector& seed, const IkOptions& options,
            JointVector* out) {
  JointVector q = seed;
  double mu = 1e-3;
  RigidTransform flange;
  Eigen::Matrix<double, 6, 6> jac = geometric_jacobian(table, q, &flange);
  Eigen::Matrix<double, 6, 1> err = pose_error(target, flange);
  for (int it = 0; it < options.max_iters; ++it) {
    if (err.head<3>().norm() <= options.position_tol && err.tail<3>().norm() <= options.rotation_tol) {
      *out = q;
      return true;
    }
    const Eigen::Matrix<double, 6, 6> jjt = jac * jac.transpose();
    JointVector dq = jac.transpose() * (jjt + mu * mu * Eigen::Matrix<double, 6, 6>::Identity()).ldlt().solve(err);
    const double n = dq.norm();
    if (n > 0.3) dq *= 0.3 / n;
    const JointVector trial = q + dq;
    RigidTransform trial_flange;
    const auto trial_jac = geometric_jacobian(table, trial, &trial_flange);
    const auto trial_err = pose_error(target, trial_flange);
    if (trial_err.norm() < err.norm()) {
      q = trial;
      jac = trial_jac;
      err = trial_err;
      mu = std::max(mu * 0.1, 1e-12);
    } else {
      mu *= 10.0;
      if (mu > 1e3) break;
    }
  }
  if (err.head<3>().norm() <= options.position_tol && err.tail<3>().norm() <= options.rotation_tol) {
    *out = q;
    return true;
  }
  return false;
}

// Walks the target in small increments so the solver stays on one branch.
bool ik_continuation(const DhTable& table, const RigidTransform& target, const JointVector& seed,
                     JointVector* out) {
  const RigidTransform start = forward_kinematics(table, seed);
  const Vec3 dw = rotation_vector(target.rotation * start.rotation.transpose());
  constexpr int kSteps = 10;
  JointVector q = seed;
  IkOptions loose;
  loose.position_tol = 1e-6;
  loose.rotation_tol = 1e-6;
  // Pairs must share an orientation to machine precision, not just to the IK default.
  IkOptions tight;
  tight.position_tol = 1e-13;
  tight.rotation_tol = 1e-13;
  for (int s = 1; s <= kSteps; ++s) {
    const double f = static_cast<double>(s) / kSteps;
    RigidTransform mid;
    mid.rotation = exp_so3(f * dw) * start.rotation;
    mid.translation = start.translation + f * (target.translation - start.translation);
    if (s == kSteps) mid = target;
    if (!try_ik(table, mid, q, s == kSteps ? tight : loose, &q)) return false;
  }
  *out = q;
  return true;
}

HolePairRecord hole_pair(const GroundTruth& truth, const JointVector& first, const Vec3& direction, const Vec3& drift,
                         const Vec3& touch_error, std::size_t location_index) {
  const RigidTransform f1 = forward_kinematics(truth.dh, first);
  const Vec3 tip1 = f1.apply(truth.tool.t);
  const Vec3 tip2 = tip1 + truth.distance * direction.normalized() + touch_error;
  RigidTransform f2;
  f2.rotation = f1.rotation * exp_so3(drift);
  f2.translation = tip2 - f2.rotation * truth.tool.t;
  JointVector second;
  if (!ik_continuation(truth.dh, f2, first, &second)) {
    throw IkNoConvergence("hole pair: second touch pose unreachable");
  }
  return {location_index, first, second};
}

}  // namespace

DhTable perturb_dh(const DhTable& nominal, double linear_range, double angular_range, std::uint64_t seed) {
  return perturb_dh(nominal, linear_range, angular_range, seed, {});
}

DhTable perturb_dh(const DhTable& nominal, double linear_range, double angular_range, std::uint64_t seed,
                   std::span<const std::string> frozen) {
  if (!(linear_range >= 0.0) || !(angular_range >= 0.0)) throw InvalidInput("perturb_dh: ranges must be >= 0");
  Rng rng = make_rng(seed, 0x64685f7065727475ULL);
  DhTable out = nominal;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    double* fields[4] = {&out[j].a, &out[j].alpha, &out[j].theta, &out[j].d};
    for (std::size_t f = 0; f < 4; ++f) {
      const double range = (f == 1 || f == 2) ? angular_range : linear_range;
      const double delta = uniform(rng, -1.0, 1.0) * range;
      if (std::find(frozen.begin(), frozen.end(), dh_entry_name(j, f)) != frozen.end()) continue;
      *fields[f] += delta;
    }
  }
  return out;
}

LaserExtrinsics perturb_extrinsics(const LaserExtrinsics& nominal, double linear_range, double angular_range,
                                   std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x6578745f70657274ULL);
  Vec3 dp, dw;
  for (int i = 0; i < 3; ++i) dp(i) = uniform(rng, -linear_range, linear_range);
  for (int i = 0; i < 3; ++i) dw(i) = uniform(rng, -1.0, 1.0) * angular_range / std::sqrt(3.0);
  RigidTransform t = nominal.transform();
  t.rotation = t.rotation * exp_so3(dw);
  t.translation += dp;
  return LaserExtrinsics::from_transform(t);
}

JointVector numerical_ik(const DhTable& table, const RigidTransform& target, const JointVector& seed_joints,
                         const IkOptions& options) {
  if (!target.rotation.allFinite() || !target.translation.allFinite()) throw InvalidInput("numerical_ik: non-finite target");
  JointVector q;
  if (!try_ik(table, target, seed_joints, options, &q)) {
    throw IkNoConvergence("numerical_ik: tolerance not met (target unreachable or poorly seeded)");
  }
  return q;
}

std::vector<ScanRecord> generate_scan_dataset(const GroundTruth& truth, std::size_t plane_count,
                                              std::size_t poses_per_plane, std::size_t points_per_pose,
                                              const NoiseModel& noise, std::uint64_t seed,
                                              const ScanGeometry& geometry) {
  if (plane_count > truth.planes.size()) throw InvalidInput("generate_scan_dataset: more plates requested than defined");
  if (points_per_pose == 0) throw InvalidInput("generate_scan_dataset: points_per_pose must be >= 1");
  const Vec3 shoulder = dh_transform(truth.dh[0], 0.0).translation;
  const RigidTransform laser = truth.ext.transform();
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<ScanRecord> out;
  out.reserve(plane_count * poses_per_plane);
  for (std::size_t k = 0; k < plane_count; ++k) {
    const PlaneParams& plane = truth.planes[k];
    const double shoulder_side = plane.signed_distance(shoulder);
    Rng rng = make_rng(seed, 1000 + k);
    Rng noise_rng = make_rng(noise.seed ^ seed, 2000 + k);
    for (std::size_t j = 0; j < poses_per_plane; ++j) {
      bool found = false;
      for (std::size_t attempt = 0; attempt < geometry.max_attempts_per_pose && !found; ++attempt) {
        const JointVector q = random_joints(rng, geometry.joint_range);
        const RigidTransform pose = forward_kinematics(truth.dh, q) * laser;
        const Vec3 origin = pose.translation;
        const double side = plane.signed_distance(origin);
        if (side * shoulder_side <= 0.0) continue;
        // Range along direction d (laser frame) to the plate.
        auto range_at = [&](double phi) {
          const Vec3 d = pose.rotation * Vec3(std::sin(phi), 0.0, std::cos(phi));
          const double denom = plane.normal.dot(d);
          return denom == 0.0 ? -1.0 : -side / denom;
        };
        const Vec3 axis = pose.rotation.col(2);
        if (std::acos(std::min(1.0, std::abs(plane.normal.dot(axis)))) > geometry.max_incidence) continue;
        bool in_range = true;
        for (double phi : {-geometry.fan_half_angle, 0.0, geometry.fan_half_angle}) {
          const double r = range_at(phi);
          const double w = r * std::cos(phi);
          if (!(r > 0.0) || w < geometry.min_range || w > geometry.max_range) in_range = false;
        }
        if (!in_range) continue;

        ScanRecord rec;
        rec.plane_index = k;
        rec.joints = q;
        rec.points.reserve(points_per_pose);
        for (std::size_t i = 0; i < points_per_pose; ++i) {
          const double phi = uniform(rng, -geometry.fan_half_angle, geometry.fan_half_angle);
          double r = range_at(phi);
          if (noise.laser_sigma > 0.0) r += noise.laser_sigma * gauss(noise_rng);
          if (noise.outlier_rate > 0.0 && uniform(noise_rng, 0.0, 1.0) < noise.outlier_rate) {
            r += (uniform(noise_rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * noise.outlier_magnitude;
          }
          rec.points.push_back({r * std::sin(phi), r * std::cos(phi)});
        }
        out.push_back(std::move(rec));
        found = true;
      }
      if (!found) {
        throw PoseSamplingExhausted("generate_scan_dataset: no valid pose found for plate " + std::to_string(k + 1));
      }
    }
  }
  return out;
}

HolePairRecord make_hole_pair(const GroundTruth& truth, const JointVector& first, const Vec3& direction,
                              const Vec3& drift, std::size_t location_index) {
  return hole_pair(truth, first, direction, drift, Vec3::Zero(), location_index);
}

std::vector<HolePairRecord> generate_hole_dataset(const GroundTruth& truth, std::size_t pair_count,
                                                  std::uint64_t seed, double touch_sigma) {
  if (!(truth.distance > 0.0)) throw InvalidInput("generate_hole_dataset: D must be positive");
  constexpr int kRetries = 200;
  std::vector<HolePairRecord> out;
  out.reserve(pair_count);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t l = 0; l < pair_count; ++l) {
    Rng rng = make_rng(seed, 3000 + l);
    bool done = false;
    for (int attempt = 0; attempt < kRetries && !done; ++attempt) {
      const JointVector q1 = random_joints(rng, 2.0);
      // Plate tilted at most 45° from horizontal; the hole axis lies in it.
      Vec3 normal;
      do {
        normal = random_unit(rng);
      } while (std::abs(normal.z()) < std::cos(std::numbers::pi / 4));
      Vec3 dir = random_unit(rng);
      dir = (dir - dir.dot(normal) * normal);
      if (dir.norm() < 1e-3) continue;
      Vec3 touch = Vec3::Zero();
      if (touch_sigma > 0.0) {
        for (int i = 0; i < 3; ++i) touch(i) = touch_sigma * (gauss(rng) - gauss(rng));
      }
      try {
        out.push_back(hole_pair(truth, q1, dir.normalized(), Vec3::Zero(), touch, l));
        done = true;
      } catch (const IkNoConvergence&) {
      }
    }
    if (!done) throw IkNoConvergence("generate_hole_dataset: retry budget exhausted for location " + std::to_string(l + 1));
  }
  return out;
}

std::vector<OraclePosePair> generate_oracle_pairs(const GroundTruth& truth, std::size_t count, std::uint64_t seed) {
  std::vector<OraclePosePair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, 4000 + i);
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      const JointVector q1 = random_joints(rng, 2.0);
      const RigidTransform f1 = forward_kinematics(truth.dh, q1);
      RigidTransform f2 = f1;
      f2.translation += uniform(rng, 0.1, 0.5) * random_unit(rng);
      JointVector q2;
      if (ik_continuation(truth.dh, f2, q1, &q2)) {
        out.push_back({q1, q2});
        done = true;
      }
    }
    if (!done) throw IkNoConvergence("generate_oracle_pairs: retry budget exhausted");
  }
  return out;
}

std::vector<PlaneParams> default_plates() {
  return {PlaneParams::from_normal(Vec3(0.0, 0.0, 1.0), 0.0),
          PlaneParams::from_normal(Vec3(0.2, 0.6, 0.7745966692414834), 0.45),
          PlaneParams::from_normal(Vec3(-0.6, -0.2, 0.7745966692414834), 0.40)};
}

SimulationConfig SimulationConfig::defaults() {
  SimulationConfig c;
  c.nominal_dh = nominal_denso_table();
  c.nominal_ext = nominal_laser_extrinsics();
  c.tool.t = Vec3(0.010, -0.020, 0.150);
  c.planes = default_plates();
  return c;
}

void SimulationConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidInput("config field '" + field + "': " + why);
  };
  if (plane_count < 1) fail("plane_count", "must be >= 1");
  if (plane_count > planes.size()) fail("plane_count", "exceeds the number of defined plates");
  if (poses_per_plane < 1) fail("poses_per_plane", "must be >= 1");
  if (points_per_pose < 2) fail("points_per_pose", "must be >= 2");
  if (calibration_pairs > hole_pairs) fail("calibration_pairs", "exceeds hole_pairs");
  if (!(scan_calibration_fraction > 0.0 && scan_calibration_fraction <= 1.0)) {
    fail("scan_calibration_fraction", "must lie in (0, 1]");
  }
  if (!(distance > 0.0)) fail("distance", "must be positive");
  if (!(noise.laser_sigma >= 0.0)) fail("noise.laser_sigma", "must be >= 0");
  if (!(noise.outlier_rate >= 0.0 && noise.outlier_rate < 1.0)) fail("noise.outlier_rate", "must lie in [0, 1)");
  if (!(noise.touch_sigma >= 0.0)) fail("noise.touch_sigma", "must be >= 0");
  if (!(dh_linear_error >= 0.0) || !(dh_angular_error >= 0.0)) fail("perturbation", "ranges must be >= 0");
  if (!is_finite(nominal_dh)) fail("nominal.dh", "must be finite");
  if (geometry.min_range >= geometry.max_range) fail("geometry.min_range", "must be below max_range");
}

std::vector<ScanRecord> SyntheticDataset::scans_in(Split split) const {
  std::vector<ScanRecord> out;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (scan_splits[i] == split) out.push_back(scans[i]);
  }
  return out;
}

std::vector<HolePairRecord> SyntheticDataset::pairs_in(Split split) const {
  std::vector<HolePairRecord> out;
  for (std::size_t i = 0; i < hole_pairs.size(); ++i) {
    if (pair_splits[i] == split) out.push_back(hole_pairs[i]);
  }
  return out;
}

SyntheticDataset SyntheticDataset::restricted_to_planes(std::size_t count) const {
  SyntheticDataset out = *this;
  out.scans.clear();
  out.scan_splits.clear();
  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (scans[i].plane_index < count) {
      out.scans.push_back(scans[i]);
      out.scan_splits.push_back(scan_splits[i]);
    }
  }
  out.plane_count = std::min(plane_count, count);
  if (out.truth && out.truth->planes.size() > count) out.truth->planes.resize(count);
  return out;
}

SyntheticDataset simulate(const SimulationConfig& config) {
  config.validate();
  const auto frozen = default_fixed_names();

  GroundTruth truth;
  truth.dh = perturb_dh(config.nominal_dh, config.dh_linear_error, config.dh_angular_error, config.seed, frozen);
  truth.ext = perturb_extrinsics(config.nominal_ext, config.laser_linear_error, config.laser_angular_error, config.seed);
  truth.planes.assign(config.planes.begin(), config.planes.begin() + static_cast<std::ptrdiff_t>(config.plane_count));
  truth.tool = config.tool;
  truth.distance = config.distance;

  SyntheticDataset ds;
  ds.seed = config.seed;
  ds.plane_count = config.plane_count;
  ds.nominal_dh = config.nominal_dh;
  ds.nominal_ext = config.nominal_ext;
  ds.tool_nominal = config.tool;
  ds.distance = config.distance;

  NoiseModel noise = config.noise;
  if (noise.seed == 0) noise.seed = config.seed;
  ds.scans = generate_scan_dataset(truth, config.plane_count, config.poses_per_plane, config.points_per_pose, noise,
                                   config.seed, config.geometry);
  ds.hole_pairs = generate_hole_dataset(truth, config.hole_pairs, config.seed, config.noise.touch_sigma);
  ds.oracle_pairs = generate_oracle_pairs(truth, config.oracle_pairs, config.seed);

  // Per-plate shuffled split of scan records, shuffled split of hole pairs.
  Rng rng = make_rng(config.seed, 5000);
  ds.scan_splits.assign(ds.scans.size(), Split::Validation);
  for (std::size_t k = 0; k < config.plane_count; ++k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.scans.size(); ++i) {
      if (ds.scans[i].plane_index == k) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_cal = static_cast<std::size_t>(std::llround(config.scan_calibration_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < std::min(n_cal, idx.size()); ++i) ds.scan_splits[idx[i]] = Split::Calibration;
  }
  std::vector<std::size_t> pidx(ds.hole_pairs.size());
  std::iota(pidx.begin(), pidx.end(), 0);
  std::shuffle(pidx.begin(), pidx.end(), rng);
  ds.pair_splits.assign(ds.hole_pairs.size(), Split::Validation);
  for (std::size_t i = 0; i < config.calibration_pairs; ++i) ds.pair_splits[pidx[i]] = Split::Calibration;

  ds.truth = std::move(truth);
  return ds;
}

}  // namespace lrfcal
