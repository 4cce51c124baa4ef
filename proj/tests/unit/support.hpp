#pragma once

#include "lrfcal/simulator.hpp"

#include <Eigen/Dense>

namespace lrfcal::test {

// Elementary homogeneous matrices, written out independently of the library.
inline Eigen::Matrix4d hx_rot(double a) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(1, 1) = std::cos(a);
  m(1, 2) = -std::sin(a);
  m(2, 1) = std::sin(a);
  m(2, 2) = std::cos(a);
  return m;
}

inline Eigen::Matrix4d hz_rot(double a) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = std::cos(a);
  m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a);
  m(1, 1) = std::cos(a);
  return m;
}

inline Eigen::Matrix4d hx_trans(double a) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 3) = a;
  return m;
}

inline Eigen::Matrix4d hz_trans(double d) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(2, 3) = d;
  return m;
}

inline Eigen::Matrix4d oracle_joint(const DhRow& r, double q) {
  return hx_rot(r.alpha) * hx_trans(r.a) * hz_rot(r.theta + q) * hz_trans(r.d);
}

inline Eigen::Matrix4d oracle_chain(const DhTable& t, const JointVector& q) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 6; ++i) m = m * oracle_joint(t[static_cast<std::size_t>(i)], q(i));
  return m;
}

/// Noiseless default experiment (cached; simulation is deterministic).
inline const SyntheticDataset& noiseless_dataset() {
  static const SyntheticDataset ds = [] {
    SimulationConfig c = SimulationConfig::defaults();
    c.noise = NoiseModel{};
    return simulate(c);
  }();
  return ds;
}

inline CalibrationParams truth_params(const SyntheticDataset& ds) {
  return {ds.truth->dh, ds.truth->ext,
          {ds.truth->planes.begin(), ds.truth->planes.begin() + static_cast<std::ptrdiff_t>(ds.plane_count)}};
}

}  // namespace lrfcal::test
