#include "lrfcal/errors.hpp"
#include "lrfcal/identifiability.hpp"
#include "lrfcal/solver.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace lrfcal {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

ResidualFunction rosenbrock() {
  return [](const Eigen::VectorXd& x) { return vec({10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0)}); };
}

void expect_non_increasing(const FitResult& r) {
  ASSERT_FALSE(r.residual_history.empty());
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
    EXPECT_LE(r.residual_history[i], r.residual_history[i - 1]);
  }
}

TEST(FiniteDifference, Square) {
  const ResidualFunction f = [](const Eigen::VectorXd& x) { return vec({x(0) * x(0)}); };
  const Eigen::MatrixXd j = finite_difference_jacobian(f, vec({2.0}), vec({1e-6}));
  EXPECT_NEAR(j(0, 0), 4.0, 1e-9);
}

TEST(FiniteDifference, AffineMapIsExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(7, 4);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(7);
  const ResidualFunction f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x - b; };
  const Eigen::MatrixXd j = finite_difference_jacobian(f, Eigen::VectorXd::Random(4), Eigen::VectorXd::Constant(4, 1e-3));
  EXPECT_LT((j - a).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(FiniteDifference, ScalarResidualsMatchOneSidedOracle) {
  const SyntheticDataset& ds = test::noiseless_dataset();
  CalibrationParams p = test::truth_params(ds);
  p.dh = ds.nominal_dh;
  p.ext = ds.nominal_ext;
  std::vector<ScanRecord> scans(ds.scans.begin(), ds.scans.begin() + 5);
  scans.push_back(ds.scans.back());
  const auto pairs = ds.pairs_in(Split::Calibration);
  const PackedParameters packed = pack_parameters(p, ParameterMask::with_fixed(2, default_fixed_names()));
  const ResidualFunction f = [&](const Eigen::VectorXd& x) {
    return scalar_residuals(unpack_parameters(x, packed.context), scans, pairs, ds.tool_nominal, ds.distance, 0.31);
  };
  const double h = 1e-6;
  const Eigen::MatrixXd central =
      finite_difference_jacobian(f, packed.free, Eigen::VectorXd::Constant(packed.free.size(), h));
  const Eigen::VectorXd f0 = f(packed.free);
  for (Eigen::Index c = 0; c < packed.free.size(); ++c) {
    Eigen::VectorXd xp = packed.free;
    xp(c) += h;
    const Eigen::VectorXd forward = (f(xp) - f0) / h;
    // One-sided error is O(h · |f''|); second derivatives here are O(1).
    EXPECT_LT((forward - central.col(c)).cwiseAbs().maxCoeff(), 10 * h) << "column " << c;
  }
}

TEST(FiniteDifference, NonFiniteResidualThrows) {
  const ResidualFunction f = [](const Eigen::VectorXd& x) { return vec({std::log(x(0))}); };
  EXPECT_THROW(finite_difference_jacobian(f, vec({0.0}), vec({1e-3})), NonFiniteResidual);
}

TEST(LevenbergMarquardt, LinearScalar) {
  const ResidualFunction f = [](const Eigen::VectorXd& x) { return vec({x(0) - 3.0}); };
  const FitResult r = levenberg_marquardt(f, vec({0.0}));
  EXPECT_NEAR(r.solution(0), 3.0, 1e-9);
  EXPECT_LE(r.iterations, 4);
  EXPECT_TRUE(r.converged);
}

TEST(LevenbergMarquardt, Rosenbrock) {
  const FitResult r = levenberg_marquardt(rosenbrock(), vec({-1.2, 1.0}));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.solution(0), 1.0, 1e-8);
  EXPECT_NEAR(r.solution(1), 1.0, 1e-8);
  expect_non_increasing(r);
}

TEST(LevenbergMarquardt, RandomLinearLeastSquaresMatchSvdSolution) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::MatrixXd a(30, 6);
    Eigen::VectorXd b(30);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = g(rng);
    const Eigen::VectorXd reference = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    const ResidualFunction f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x - b; };
    const FitResult r = levenberg_marquardt(f, Eigen::VectorXd::Zero(6));
    EXPECT_LT((r.solution - reference).cwiseAbs().maxCoeff(), 1e-8) << "trial " << trial;
    expect_non_increasing(r);
  }
}

TEST(LevenbergMarquardt, ResidualToleranceOnExactFit) {
  const ResidualFunction f = [](const Eigen::VectorXd& x) { return vec({x(0) - 1.0, 2.0 * (x(1) + 0.5)}); };
  const FitResult r = levenberg_marquardt(f, vec({0.0, 0.0}));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.termination_reason, TerminationReason::ResidualTol);
  EXPECT_LT(r.final_cost(), 1e-20);
}

TEST(LevenbergMarquardt, IterationCap) {
  SolverOptions o;
  o.max_iterations = 1;
  const FitResult r = levenberg_marquardt(rosenbrock(), vec({-1.2, 1.0}), o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.termination_reason, TerminationReason::MaxIter);
  EXPECT_EQ(r.iterations, 1);
}

TEST(LevenbergMarquardt, InfeasibleStepsAreShortened) {
  const ResidualFunction f = [](const Eigen::VectorXd& x) { return vec({x(0) - 2.0}); };
  const DomainPredicate feasible = [](const Eigen::VectorXd& x) { return x(0) <= 1.0; };
  const FitResult r = levenberg_marquardt(f, vec({0.0}), {}, feasible);
  EXPECT_LE(r.solution(0), 1.0);
  EXPECT_GT(r.solution(0), 0.9);
  expect_non_increasing(r);
}

TEST(LevenbergMarquardt, Deterministic) {
  const FitResult a = levenberg_marquardt(rosenbrock(), vec({-1.2, 1.0}));
  const FitResult b = levenberg_marquardt(rosenbrock(), vec({-1.2, 1.0}));
  EXPECT_EQ(a.solution, b.solution);
  EXPECT_EQ(a.residual_history, b.residual_history);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(LevenbergMarquardt, NonFiniteStartThrows) {
  const ResidualFunction f = [](const Eigen::VectorXd& x) { return vec({std::sqrt(x(0))}); };
  EXPECT_THROW(levenberg_marquardt(f, vec({-1.0})), NonFiniteResidual);
}

TEST(TerminationReason, Names) {
  EXPECT_EQ(to_string(TerminationReason::ResidualTol), "residual_tolerance");
  EXPECT_EQ(to_string(TerminationReason::StepTol), "step_tolerance");
  EXPECT_EQ(to_string(TerminationReason::MaxIter), "max_iterations");
}

}  // namespace
}  // namespace lrfcal
