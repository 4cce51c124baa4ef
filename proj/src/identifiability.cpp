#include "lrfcal/identifiability.hpp"

#include "lrfcal/errors.hpp"
#include "lrfcal/solver.hpp"

#include <algorithm>
#include <cmath>

namespace lrfcal {

std::set<std::string> IdentifiabilityReport::dependent_parameters() const {
  std::set<std::string> out;
  for (const auto& g : dependent_groups) out.insert(g.begin(), g.end());
  return out;
}

std::vector<std::string> identification_parameter_names(std::size_t planes) {
  const auto names = parameter_names(planes);
  std::vector<std::string> out;
  for (auto i : ParameterMask::all_free(planes).free_indices()) out.push_back(names[i]);
  return out;
}

Eigen::MatrixXd identification_jacobian(const CalibrationParams& params, std::span<const ScanRecord> scans,
                                        const JacobianOptions& options) {
  const auto packed = pack_parameters(params, ParameterMask::all_free(params.planes.size()));
  const ResidualFunction f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const auto p = unpack_parameters(x, packed.context);
    if (options.include_distance_rows) {
      return scalar_residuals(p, scans, options.pairs, options.tool, options.distance, options.weight);
    }
    return planar_residuals(p, scans);
  };
  return finite_difference_jacobian(f, packed.free, Eigen::VectorXd::Constant(packed.free.size(), options.fd_step));
}

IdentifiabilityReport identifiability_analysis(const Eigen::MatrixXd& jacobian, const std::vector<std::string>& names,
                                               double tolerance_ratio, double group_threshold) {
  if (jacobian.size() == 0) throw InvalidInput("identifiability_analysis: empty Jacobian");
  if (static_cast<std::size_t>(jacobian.cols()) != names.size()) {
    throw InvalidInput("identifiability_analysis: one name per column required");
  }
  if (!(tolerance_ratio > 0.0 && tolerance_ratio < 1.0)) {
    throw InvalidInput("identifiability_analysis: tolerance_ratio must lie in (0, 1)");
  }

  const Eigen::Index n = jacobian.cols();
  // Thin SVD of J gives only min(rows, cols) values; pad so that short
  // matrices still report a full-length spectrum and null space.
  Eigen::MatrixXd work = jacobian;
  if (jacobian.rows() < n) {
    work = Eigen::MatrixXd::Zero(n, n);
    work.topRows(jacobian.rows()) = jacobian;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(work, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();

  IdentifiabilityReport report;
  report.parameter_names = names;
  report.tolerance_ratio = tolerance_ratio;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cutoff = tolerance_ratio * sv(0);
  report.numerical_rank = static_cast<std::size_t>((sv.array() > cutoff).count());
  report.nullity = static_cast<std::size_t>(n) - report.numerical_rank;
  report.null_space = svd.matrixV().rightCols(static_cast<Eigen::Index>(report.nullity));

  // Reduce the null basis to echelon form with full pivoting so each
  // direction is anchored on one parameter and zero on the other anchors.
  Eigen::MatrixXd basis = report.null_space.transpose();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index row = 0; row < basis.rows(); ++row) {
    Eigen::Index best_r = row, best_c = -1;
    double best = 0.0;
    for (Eigen::Index r = row; r < basis.rows(); ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (!used[static_cast<std::size_t>(c)] && std::abs(basis(r, c)) > best) {
          best = std::abs(basis(r, c));
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best_c < 0) break;
    used[static_cast<std::size_t>(best_c)] = true;
    basis.row(row).swap(basis.row(best_r));
    basis.row(row) /= basis(row, best_c);
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      if (r != row) basis.row(r) -= basis(r, best_c) * basis.row(row);
    }
  }
  for (Eigen::Index row = 0; row < basis.rows(); ++row) {
    const double peak = basis.row(row).cwiseAbs().maxCoeff();
    std::vector<std::string> group;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (std::abs(basis(row, c)) > group_threshold * peak) group.push_back(names[static_cast<std::size_t>(c)]);
    }
    report.dependent_groups.push_back(std::move(group));
  }
  return report;
}

std::vector<std::string> default_fixed_names() { return {"d6", "theta6", "d2", "a1", "alpha1", "theta1", "d1"}; }

Eigen::MatrixXd drop_columns(const Eigen::MatrixXd& jacobian, const std::vector<std::string>& names,
                             const std::vector<std::string>& drop, std::vector<std::string>* kept) {
  std::vector<Eigen::Index> cols;
  std::vector<std::string> kept_names;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (std::find(drop.begin(), drop.end(), names[c]) == drop.end()) {
      cols.push_back(static_cast<Eigen::Index>(c));
      kept_names.push_back(names[c]);
    }
  }
  Eigen::MatrixXd out(jacobian.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = jacobian.col(cols[i]);
  if (kept) *kept = std::move(kept_names);
  return out;
}

}  // namespace lrfcal
