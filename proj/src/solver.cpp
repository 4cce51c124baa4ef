#include "lrfcal/solver.hpp"

#include "lrfcal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lrfcal {

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::ResidualTol: return "residual_tolerance";
    case TerminationReason::StepTol: return "step_tolerance";
    case TerminationReason::MaxIter: return "max_iterations";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd evaluate(const ResidualFunction& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd r = f(x);
  if (!r.allFinite()) throw NonFiniteResidual("residual function returned non-finite values");
  return r;
}

void validate(const SolverOptions& o, Eigen::Index n) {
  if (o.max_iterations < 1 || !(o.residual_tolerance > 0) || !(o.step_tolerance > 0) ||
      !(o.initial_damping > 0) || !(o.damping_up > 1) || !(o.damping_down > 1) || !(o.default_fd_step > 0)) {
    throw InvalidInput("levenberg_marquardt: invalid solver options");
  }
  if (o.fd_step.size() != 0 && (o.fd_step.size() != n || (o.fd_step.array() <= 0).any())) {
    throw InvalidInput("levenberg_marquardt: fd_step must be empty or positive per parameter");
  }
}

}  // namespace

Eigen::MatrixXd finite_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& step) {
  if (step.size() != x.size() || (step.array() <= 0).any()) {
    throw InvalidInput("finite_difference_jacobian: step must be positive per parameter");
  }
  Eigen::MatrixXd jac;
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step(j);
    probe(j) = x(j) + h;
    const Eigen::VectorXd plus = evaluate(f, probe);
    probe(j) = x(j) - h;
    const Eigen::VectorXd minus = evaluate(f, probe);
    probe(j) = x(j);
    if (j == 0) jac.resize(plus.size(), x.size());
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

FitResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                              const SolverOptions& options, const DomainPredicate& feasible) {
  validate(options, x0.size());
  const Eigen::VectorXd step = options.fd_step.size() != 0
                                   ? options.fd_step
                                   : Eigen::VectorXd::Constant(x0.size(), options.default_fd_step);

  FitResult result;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = evaluate(f, x);
  double cost = r.squaredNorm();
  result.residual_history.push_back(cost);

  auto finish = [&](TerminationReason why, bool converged) {
    result.solution = x;
    result.termination_reason = why;
    result.converged = converged;
    return result;
  };

  if (cost <= options.residual_tolerance) return finish(TerminationReason::ResidualTol, true);
  if (x.size() == 0) return finish(TerminationReason::StepTol, true);

  double lambda = options.initial_damping;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    const Eigen::MatrixXd jac = finite_difference_jacobian(f, x, step);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    Eigen::VectorXd scale = normal.diagonal();
    const double floor = std::max(scale.maxCoeff(), 1.0) * 1e-15;
    scale = scale.cwiseMax(floor);

    while (true) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += lambda * scale;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(damped);
      Eigen::VectorXd delta;
      if (qr.isInvertible()) delta = qr.solve(-gradient);
      if (delta.size() == 0 || !delta.allFinite()) {
        lambda *= options.damping_up;
        if (lambda > options.max_damping) {
          throw SingularNormalEquations("levenberg_marquardt: damped normal equations singular at max damping");
        }
        continue;
      }
      if (feasible) {
        int halvings = 0;
        while (!feasible(x + delta) && halvings < 60) {
          delta *= 0.5;
          ++halvings;
        }
      }
      if (delta.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance)) {
        return finish(TerminationReason::StepTol, true);
      }
      const Eigen::VectorXd trial = x + delta;
      const Eigen::VectorXd r_trial = evaluate(f, trial);
      const double trial_cost = r_trial.squaredNorm();
      if (trial_cost < cost) {
        x = trial;
        r = r_trial;
        cost = trial_cost;
        result.residual_history.push_back(cost);
        lambda = std::max(lambda / options.damping_down, 1e-300);
        if (cost <= options.residual_tolerance) return finish(TerminationReason::ResidualTol, true);
        break;
      }
      lambda *= options.damping_up;
      if (lambda > options.max_damping) {
        // No decrease even along the scaled gradient: x is stationary to rounding.
        return finish(TerminationReason::StepTol, true);
      }
    }
  }
  return finish(TerminationReason::MaxIter, false);
}

}  // namespace lrfcal
