#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string_view>
#include <vector>

namespace lrfcal {

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
/// Optional feasibility test; infeasible trial points get their step halved.
using DomainPredicate = std::function<bool(const Eigen::VectorXd&)>;

struct SolverOptions {
  int max_iterations = 100;
  double residual_tolerance = 1e-20;  // on the sum of squares, m²
  double step_tolerance = 1e-10;      // relative to |x|
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 10.0;
  double max_damping = 1e10;
  double default_fd_step = 1e-7;
  Eigen::VectorXd fd_step;  // per entry; empty means default_fd_step everywhere
};

enum class TerminationReason { ResidualTol, StepTol, MaxIter };

std::string_view to_string(TerminationReason reason);

struct FitResult {
  Eigen::VectorXd solution;
  int iterations = 0;
  std::vector<double> residual_history;  // sum of squares after each accepted step, starting at x0
  bool converged = false;
  TerminationReason termination_reason = TerminationReason::MaxIter;

  double final_cost() const { return residual_history.back(); }
};

/// Central differences, column j = (f(x + h_j e_j) − f(x − h_j e_j)) / 2h_j.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& step);

/**
 * @brief Levenberg-Marquardt with Marquardt's diagonal scaling.
 *
 * Solves (JᵀJ + λ diag(JᵀJ)) δ = −Jᵀr with a rank-revealing QR. A step is
 * accepted only when the sum of squares strictly decreases; λ is divided by
 * damping_down on acceptance and multiplied by damping_up on rejection.
 */
FitResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                              const SolverOptions& options = {}, const DomainPredicate& feasible = {});

}  // namespace lrfcal
