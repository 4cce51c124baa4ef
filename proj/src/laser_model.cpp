#include "lrfcal/laser_model.hpp"

#include "lrfcal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace lrfcal {

LaserExtrinsics LaserExtrinsics::from_components(double rx, double ry, double angle,
                                                 const Vec3& position) {
  LaserExtrinsics e;
  e.axis = Vec3(rx, ry, complete_unit_vector(rx, ry));
  e.angle = angle;
  e.position = position;
  return e;
}

LaserExtrinsics LaserExtrinsics::from_transform(const RigidTransform& flange_to_laser) {
  const Eigen::AngleAxisd aa(flange_to_laser.rotation);
  Vec3 axis = aa.axis();
  double angle = aa.angle();  // [0, π]
  if (axis.z() < 0.0) {
    axis = -axis;
    angle = 2.0 * std::numbers::pi - angle;
  }
  if (angle >= 2.0 * std::numbers::pi) angle -= 2.0 * std::numbers::pi;
  return from_components(axis.x(), axis.y(), angle, flange_to_laser.translation);
}

RigidTransform LaserExtrinsics::transform() const {
  RigidTransform t;
  t.rotation = axis_angle_matrix(axis, angle);
  t.translation = position;
  return t;
}

LaserExtrinsics nominal_laser_extrinsics() {
  return LaserExtrinsics::from_components(0.0, 0.0, 3.14, Vec3(-127.50e-3, -33.00e-3, 101.50e-3));
}

RigidTransform laser_pose(const DhTable& table, const JointVector& joints, const LaserExtrinsics& ext) {
  return forward_kinematics(table, joints) * ext.transform();
}

Vec3 laser_point_to_base(const DhTable& table, const JointVector& joints, const LaserExtrinsics& ext,
                         const ScanPoint& pt) {
  return laser_pose(table, joints, ext).apply(embed(pt));
}

namespace {

struct Line2 {
  Eigen::Vector2d point;
  Eigen::Vector2d normal;  // unit

  double distance(const ScanPoint& p) const {
    return std::abs(normal.dot(Eigen::Vector2d(p.u, p.w) - point));
  }
};

Line2 tls_line(std::span<const ScanPoint> profile, std::span<const std::size_t> idx) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (auto i : idx) c += Eigen::Vector2d(profile[i].u, profile[i].w);
  c /= static_cast<double>(idx.size());
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (auto i : idx) {
    const Eigen::Vector2d d = Eigen::Vector2d(profile[i].u, profile[i].w) - c;
    s += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
  return {c, eig.eigenvectors().col(0)};
}

std::vector<std::size_t> consensus(std::span<const ScanPoint> profile, const Line2& line, double threshold) {
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (line.distance(profile[i]) <= threshold) in.push_back(i);
  }
  return in;
}

}  // namespace

std::vector<std::size_t> ransac_line_filter(std::span<const ScanPoint> profile, const RansacOptions& options) {
  if (profile.size() < 2) throw InvalidInput("ransac_line_filter: need at least 2 points");
  if (!(options.inlier_threshold > 0.0)) throw InvalidInput("ransac_line_filter: threshold must be > 0");

  const Eigen::Vector2d first(profile[0].u, profile[0].w);
  const bool degenerate = std::all_of(profile.begin(), profile.end(), [&](const ScanPoint& p) {
    return (Eigen::Vector2d(p.u, p.w) - first).norm() == 0.0;
  });
  if (degenerate) throw DegenerateProfile("ransac_line_filter: all points coincide");

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, profile.size() - 1);

  std::vector<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < std::max<std::size_t>(options.iterations, 1); ++it) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (profile.size() == 2) j = 1 - i;
    const Eigen::Vector2d pi(profile[i].u, profile[i].w), pj(profile[j].u, profile[j].w);
    const Eigen::Vector2d dir = pj - pi;
    if (i == j || dir.norm() == 0.0) continue;
    const Line2 line{pi, Eigen::Vector2d(-dir.y(), dir.x()).normalized()};
    auto in = consensus(profile, line, options.inlier_threshold);
    double cost = 0.0;
    for (auto k : in) cost += std::pow(line.distance(profile[k]), 2);
    if (in.size() > best.size() || (in.size() == best.size() && cost < best_cost)) {
      best = std::move(in);
      best_cost = cost;
    }
  }
  if (best.size() < 2) {
    // Every draw hit a coincident pair; fall back to the first distinct pair.
    for (std::size_t j = 1; j < profile.size(); ++j) {
      const Eigen::Vector2d d = Eigen::Vector2d(profile[j].u, profile[j].w) - first;
      if (d.norm() > 0.0) {
        best = consensus(profile, Line2{first, Eigen::Vector2d(-d.y(), d.x()).normalized()},
                         options.inlier_threshold);
        break;
      }
    }
  }
  auto refit = consensus(profile, tls_line(profile, best), options.inlier_threshold);
  return refit.size() >= best.size() ? refit : best;
}

LaserExtrinsics initial_extrinsics_linear(std::span<const ScanRecord> records, const DhTable& table,
                                          const LaserExtrinsics& seed, std::size_t max_rounds) {
  if (records.empty()) throw InvalidInput("initial_extrinsics_linear: no records");

  std::vector<RigidTransform> flange;
  std::size_t rows = 0;
  for (const auto& r : records) {
    flange.push_back(forward_kinematics(table, r.joints));
    rows += r.points.size();
  }

  LaserExtrinsics current = seed;
  std::vector<Vec3> mapped;
  mapped.reserve(rows);
  for (std::size_t round = 0; round < std::max<std::size_t>(max_rounds, 1); ++round) {
    mapped.clear();
    const RigidTransform laser = current.transform();
    for (std::size_t k = 0; k < records.size(); ++k) {
      const RigidTransform pose = flange[k] * laser;
      for (const auto& p : records[k].points) mapped.push_back(pose.apply(embed(p)));
    }
    PlaneParams plane;
    try {
      plane = fit_plane(mapped);
    } catch (const RankDeficient&) {
      throw RankDeficient("initial_extrinsics_linear: mapped points do not span a plane");
    }

    // Unknowns: A(:,0), A(:,2), b. Row: m·(A p + b) = l − n·t_E with m = R_Eᵀ n.
    Eigen::MatrixXd lhs(static_cast<Eigen::Index>(rows), 9);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
      const Vec3 m = flange[k].rotation.transpose() * plane.normal;
      const double target = plane.offset - plane.normal.dot(flange[k].translation);
      for (const auto& p : records[k].points) {
        lhs.block<1, 3>(row, 0) = p.u * m.transpose();
        lhs.block<1, 3>(row, 3) = p.w * m.transpose();
        lhs.block<1, 3>(row, 6) = m.transpose();
        rhs(row) = target;
        ++row;
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lhs);
    qr.setThreshold(1e-10);
    if (qr.rank() < 9) {
      throw RankDeficient("initial_extrinsics_linear: linear system has rank " + std::to_string(qr.rank()) +
                          " < 9 (insufficient pose variety)");
    }
    const Eigen::VectorXd sol = qr.solve(rhs);
    const Vec3 cx = sol.segment<3>(0), cz = sol.segment<3>(3);
    Mat3 a;
    a.col(0) = cx;
    a.col(1) = cz.cross(cx);
    a.col(2) = cz;
    RigidTransform next;
    next.rotation = nearest_rotation(a);
    next.translation = sol.segment<3>(6);

    const RigidTransform prev = current.transform();
    current = LaserExtrinsics::from_transform(next);
    const double change = (next.translation - prev.translation).norm() +
                          rotation_distance(next.rotation, prev.rotation);
    if (change < 1e-14) break;
  }
  return current;
}

}  // namespace lrfcal
