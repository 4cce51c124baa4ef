#include "lrfcal/objective.hpp"

#include "lrfcal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lrfcal {

namespace {

constexpr std::size_t kRz = kLaserOffset + 2;

std::size_t plane_base(std::size_t k) { return kPlaneOffset + 4 * k; }

std::vector<std::size_t> order_by(std::size_t n, auto key) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  return idx;
}

}  // namespace

std::vector<std::string> parameter_names(std::size_t planes) {
  std::vector<std::string> names;
  names.reserve(parameter_count(planes));
  for (std::size_t j = 0; j < kJointCount; ++j) {
    for (std::size_t f = 0; f < 4; ++f) names.push_back(dh_entry_name(j, f));
  }
  for (const char* n : {"rx", "ry", "rz", "rw", "px", "py", "pz"}) names.emplace_back(n);
  for (std::size_t k = 0; k < planes; ++k) {
    const std::string id = std::to_string(k + 1);
    names.push_back("n" + id + "x");
    names.push_back("n" + id + "y");
    names.push_back("n" + id + "z");
    names.push_back("l" + id);
  }
  return names;
}

std::size_t parameter_index(const std::string& name, std::size_t planes) {
  const auto names = parameter_names(planes);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidInput("unknown parameter name '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<std::size_t> dependent_indices(std::size_t planes) {
  std::vector<std::size_t> idx{kRz};
  for (std::size_t k = 0; k < planes; ++k) idx.push_back(plane_base(k) + 2);
  return idx;
}

bool is_angle_entry(std::size_t index) {
  if (index < kDhEntryCount) {
    const std::size_t field = index % 4;
    return field == 1 || field == 2;
  }
  return index == kLaserOffset + 3;
}

std::vector<double> flatten(const CalibrationParams& params) {
  std::vector<double> v;
  v.reserve(parameter_count(params.planes.size()));
  for (const auto& r : params.dh) {
    v.insert(v.end(), {r.a, r.alpha, r.theta, r.d});
  }
  const auto& e = params.ext;
  v.insert(v.end(), {e.axis.x(), e.axis.y(), e.axis.z(), e.angle, e.position.x(), e.position.y(),
                     e.position.z()});
  for (const auto& p : params.planes) {
    v.insert(v.end(), {p.normal.x(), p.normal.y(), p.normal.z(), p.offset});
  }
  return v;
}

CalibrationParams unflatten(std::span<const double> v, std::size_t planes) {
  if (v.size() != parameter_count(planes)) throw InvalidInput("unflatten: wrong parameter count");
  CalibrationParams p;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    p.dh[j] = DhRow{v[4 * j], v[4 * j + 1], v[4 * j + 2], v[4 * j + 3]};
  }
  const std::size_t o = kLaserOffset;
  p.ext = LaserExtrinsics::from_components(v[o], v[o + 1], v[o + 3], Vec3(v[o + 4], v[o + 5], v[o + 6]));
  p.planes.reserve(planes);
  for (std::size_t k = 0; k < planes; ++k) {
    const std::size_t b = plane_base(k);
    p.planes.push_back(PlaneParams::from_components(v[b], v[b + 1], v[b + 3]));
  }
  return p;
}

ParameterMask::ParameterMask(std::vector<ParamRole> roles, std::size_t planes)
    : roles_(std::move(roles)), planes_(planes) {
  if (roles_.size() != parameter_count(planes)) throw MaskConflict("mask length does not match layout");
  const auto dep = dependent_indices(planes);
  const auto names = parameter_names(planes);
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    const bool dependent = std::find(dep.begin(), dep.end(), i) != dep.end();
    if (dependent && roles_[i] != ParamRole::Dependent) {
      throw MaskConflict("'" + names[i] + "' is determined by its unit-vector partners and cannot be " +
                         (roles_[i] == ParamRole::Free ? "free" : "fixed"));
    }
    if (!dependent && roles_[i] == ParamRole::Dependent) {
      throw MaskConflict("'" + names[i] + "' is not a dependent entry");
    }
  }
}

ParameterMask ParameterMask::all_free(std::size_t planes) {
  std::vector<ParamRole> roles(parameter_count(planes), ParamRole::Free);
  for (auto i : dependent_indices(planes)) roles[i] = ParamRole::Dependent;
  return {std::move(roles), planes};
}

ParameterMask ParameterMask::with_fixed(std::size_t planes, std::span<const std::string> fixed_names) {
  auto roles = all_free(planes).roles();
  for (const auto& name : fixed_names) {
    const std::size_t i = parameter_index(name, planes);
    if (roles[i] == ParamRole::Dependent) {
      throw MaskConflict("'" + name + "' is a dependent entry and cannot be fixed");
    }
    roles[i] = ParamRole::Fixed;
  }
  return {std::move(roles), planes};
}

std::vector<std::size_t> ParameterMask::free_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (roles_[i] == ParamRole::Free) idx.push_back(i);
  }
  return idx;
}

std::vector<std::string> ParameterMask::fixed_names() const {
  const auto names = parameter_names(planes_);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (roles_[i] == ParamRole::Fixed) out.push_back(names[i]);
  }
  return out;
}

std::size_t ParameterMask::free_count() const {
  return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), ParamRole::Free));
}

PackedParameters pack_parameters(const CalibrationParams& params, const ParameterMask& mask) {
  if (params.planes.size() != mask.plane_count()) throw MaskConflict("mask plane count differs from parameters");
  PackedParameters out{Eigen::VectorXd(), PackContext{mask, flatten(params)}};
  const auto idx = mask.free_indices();
  out.free.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.free(static_cast<Eigen::Index>(i)) = out.context.reference[idx[i]];
  return out;
}

CalibrationParams unpack_parameters(const Eigen::VectorXd& free, const PackContext& context) {
  const auto idx = context.mask.free_indices();
  if (static_cast<std::size_t>(free.size()) != idx.size()) throw InvalidInput("unpack: wrong free-vector length");
  std::vector<double> full = context.reference;
  for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = free(static_cast<Eigen::Index>(i));
  return unflatten(full, context.mask.plane_count());
}

bool in_domain(const Eigen::VectorXd& free, const PackContext& context) {
  const auto idx = context.mask.free_indices();
  std::vector<double> full = context.reference;
  for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = free(static_cast<Eigen::Index>(i));
  for (auto d : dependent_indices(context.mask.plane_count())) {
    const double x = full[d - 2], y = full[d - 1];
    if (!(x * x + y * y <= 1.0)) return false;
  }
  return true;
}

Eigen::VectorXd planar_residuals(const CalibrationParams& params, std::span<const ScanRecord> scans) {
  std::size_t total = 0;
  for (const auto& s : scans) {
    if (s.plane_index >= params.planes.size()) {
      throw std::out_of_range("planar_residuals: record refers to plane " + std::to_string(s.plane_index + 1) +
                              " but only " + std::to_string(params.planes.size()) + " are parameterized");
    }
    total += s.points.size();
  }
  const auto order = order_by(scans.size(), [&](std::size_t i) { return scans[i].plane_index; });
  const RigidTransform laser = params.ext.transform();

  Eigen::VectorXd r(static_cast<Eigen::Index>(total));
  Eigen::Index row = 0;
  for (auto j : order) {
    const auto& rec = scans[j];
    const PlaneParams& plane = params.planes[rec.plane_index];
    const RigidTransform pose = forward_kinematics(params.dh, rec.joints) * laser;
    for (const auto& p : rec.points) r(row++) = plane.signed_distance(pose.apply(embed(p)));
  }
  return r;
}

Eigen::VectorXd distance_residuals(const DhTable& dh, std::span<const HolePairRecord> pairs,
                                   const ToolOffset& tool, double distance) {
  if (!(distance > 0.0)) throw InvalidInput("distance_residuals: D must be positive");
  const auto order = order_by(pairs.size(), [&](std::size_t i) { return pairs[i].location_index; });
  Eigen::VectorXd r(static_cast<Eigen::Index>(pairs.size()));
  Eigen::Index row = 0;
  for (auto l : order) {
    const Vec3 t1 = tool_tip_position(dh, pairs[l].joints_first, tool);
    const Vec3 t2 = tool_tip_position(dh, pairs[l].joints_second, tool);
    r(row++) = (t2 - t1).norm() - distance;
  }
  return r;
}

Eigen::VectorXd scalar_residuals(const CalibrationParams& params, std::span<const ScanRecord> scans,
                                 std::span<const HolePairRecord> pairs, const ToolOffset& tool,
                                 double distance, double weight) {
  if (!(weight >= 0.0)) throw InvalidInput("scalar_residuals: weight must be >= 0");
  const Eigen::VectorXd planar = planar_residuals(params, scans);
  if (pairs.empty()) return planar;
  const Eigen::VectorXd dist = distance_residuals(params.dh, pairs, tool, distance);
  Eigen::VectorXd r(planar.size() + dist.size());
  r << planar, std::sqrt(weight) * dist;
  return r;
}

}  // namespace lrfcal
