#include "lrfcal/errors.hpp"
#include "lrfcal/laser_model.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

namespace lrfcal {
namespace {

TEST(LaserExtrinsics, NominalMounting) {
  const LaserExtrinsics e = nominal_laser_extrinsics();
  EXPECT_EQ(e.axis, Vec3::UnitZ());
  EXPECT_DOUBLE_EQ(e.angle, 3.14);
  EXPECT_NEAR(e.position.x(), -0.1275, 1e-15);
  EXPECT_NEAR(e.position.y(), -0.033, 1e-15);
  EXPECT_NEAR(e.position.z(), 0.1015, 1e-15);
}

TEST(LaserExtrinsics, CanonicalFormFromTransform) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = Vec3(u(rng), u(rng), u(rng)).normalized();
    const double angle = 3.0 * u(rng);
    const RigidTransform t{axis_angle_matrix(axis, angle), Vec3(u(rng), u(rng), u(rng))};
    const LaserExtrinsics e = LaserExtrinsics::from_transform(t);
    EXPECT_GE(e.axis.z(), 0.0);
    EXPECT_GE(e.angle, 0.0);
    EXPECT_LT(e.angle, 2 * std::numbers::pi);
    EXPECT_NEAR(e.axis.norm(), 1.0, 1e-14);
    EXPECT_TRUE(e.transform().matrix().isApprox(t.matrix(), 1e-12));
    const LaserExtrinsics again = LaserExtrinsics::from_components(e.axis.x(), e.axis.y(), e.angle, e.position);
    EXPECT_TRUE(again.transform().matrix().isApprox(t.matrix(), 1e-12));
  }
}

TEST(LaserExtrinsics, OutOfDiscAxisThrows) {
  EXPECT_THROW(LaserExtrinsics::from_components(0.9, 0.9, 1.0, Vec3::Zero()), OutOfDomain);
}

TEST(LaserPointToBase, AffineInProfilePoint) {
  const DhTable table = nominal_denso_table();
  JointVector q;
  q << 0.3, 0.2, 0.9, -0.4, 0.8, 1.2;
  const LaserExtrinsics e = nominal_laser_extrinsics();
  const ScanPoint a{0.01, 0.15}, b{-0.02, 0.22}, mid{-0.005, 0.185};
  const Vec3 pa = laser_point_to_base(table, q, e, a), pb = laser_point_to_base(table, q, e, b);
  EXPECT_LT((laser_point_to_base(table, q, e, mid) - 0.5 * (pa + pb)).norm(), 1e-15);
  EXPECT_LT((laser_pose(table, q, e).apply(Vec3(a.u, 0.0, a.w)) - pa).norm(), 1e-15);
  EXPECT_EQ(embed(a), Vec3(0.01, 0.0, 0.15));
}

std::vector<ScanPoint> line_points(std::size_t n) {
  // w = 0.2 + 0.3 u
  std::vector<ScanPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = -0.03 + 0.06 * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({u, 0.2 + 0.3 * u});
  }
  return pts;
}

double distance_to_known_line(const ScanPoint& p) {
  return std::abs(0.3 * p.u - p.w + 0.2) / std::sqrt(0.3 * 0.3 + 1.0);
}

TEST(Ransac, CollinearProfileKeepsEverything) {
  const auto pts = line_points(40);
  for (double thr : {1e-9, 1e-4, 0.5e-3}) {
    const auto idx = ransac_line_filter(pts, {thr, 200, 0});
    ASSERT_EQ(idx.size(), 40u);
    for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(idx[i], i);
  }
}

TEST(Ransac, RejectsTwoDisplacedPoints) {
  auto pts = line_points(40);
  const Eigen::Vector2d normal = Eigen::Vector2d(0.3, -1.0).normalized();
  for (std::size_t k : {7u, 29u}) {
    pts[k].u += 5e-3 * normal.x();
    pts[k].w += 5e-3 * normal.y();
  }
  const auto idx = ransac_line_filter(pts, {0.5e-3, 200, 0});
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (distance_to_known_line(pts[i]) < 0.5e-3) expected.push_back(i);
  }
  ASSERT_EQ(expected.size(), 38u);
  EXPECT_EQ(idx, expected);
}

TEST(Ransac, TwoPointsAreBothInliers) {
  const std::vector<ScanPoint> pts{{0.0, 0.1}, {0.01, 0.3}};
  EXPECT_EQ(ransac_line_filter(pts), (std::vector<std::size_t>{0, 1}));
}

TEST(Ransac, DegenerateInputs) {
  EXPECT_THROW(ransac_line_filter(std::vector<ScanPoint>{{0.0, 0.1}}), InvalidInput);
  EXPECT_THROW(ransac_line_filter(std::vector<ScanPoint>(5, ScanPoint{0.01, 0.2})), DegenerateProfile);
}

TEST(Ransac, PermutationOnlyRelabelsIndices) {
  auto pts = line_points(40);
  pts[3].w += 4e-3;
  pts[17].w -= 6e-3;
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
  std::vector<ScanPoint> shuffled;
  for (auto p : perm) shuffled.push_back(pts[p]);

  const auto a = ransac_line_filter(pts);
  std::vector<std::size_t> b;
  for (auto i : ransac_line_filter(shuffled)) b.push_back(perm[i]);
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

std::vector<ScanRecord> first_plate(const SyntheticDataset& ds) {
  std::vector<ScanRecord> out;
  for (const auto& r : ds.scans) {
    if (r.plane_index == 0) out.push_back(r);
  }
  return out;
}

double extrinsic_error(const LaserExtrinsics& a, const LaserExtrinsics& b) {
  return (a.position - b.position).norm() + rotation_distance(a.transform().rotation, b.transform().rotation);
}

TEST(InitialExtrinsics, TruthIsAFixedPoint) {
  const SyntheticDataset& ds = test::noiseless_dataset();
  const LaserExtrinsics e = initial_extrinsics_linear(first_plate(ds), ds.truth->dh, ds.truth->ext);
  EXPECT_LT(extrinsic_error(e, ds.truth->ext), 1e-8);
}

TEST(InitialExtrinsics, ReducesSeedError) {
  const SyntheticDataset& ds = test::noiseless_dataset();
  for (std::uint64_t seed : {21, 22, 23, 24}) {
    const LaserExtrinsics start = perturb_extrinsics(ds.truth->ext, 2e-3, std::numbers::pi / 180, seed);
    const LaserExtrinsics e = initial_extrinsics_linear(first_plate(ds), ds.truth->dh, start);
    EXPECT_LT(extrinsic_error(e, ds.truth->ext), extrinsic_error(start, ds.truth->ext)) << "seed " << seed;
  }
}

TEST(InitialExtrinsics, SinglePoseIsRankDeficient) {
  const SyntheticDataset& ds = test::noiseless_dataset();
  const auto plate = first_plate(ds);
  const std::vector<ScanRecord> same(5, plate.front());
  EXPECT_THROW(initial_extrinsics_linear(same, ds.truth->dh, ds.nominal_ext), RankDeficient);
}

TEST(InitialExtrinsics, EmptyInputThrows) {
  EXPECT_THROW(initial_extrinsics_linear({}, nominal_denso_table(), nominal_laser_extrinsics()), InvalidInput);
}

}  // namespace
}  // namespace lrfcal
