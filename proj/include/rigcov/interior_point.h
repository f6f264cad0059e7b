#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace rigcov {

/// min f(z) subject to c_E(z) = 0 and c_I(z) <= 0, all dense.
struct NlpFunctions {
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  /// Hessian of the objective (or a positive semidefinite approximation).
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> equality;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> equality_jacobian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inequality;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> inequality_jacobian;
  /// sum_i lambda_i * Hessian(c_I,i); optional, ignored when empty.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      inequality_hessian;
};

struct InteriorPointOptions {
  double mu_init = 0.1;
  double tolerance = 1e-9;
  int max_iterations = 100;
  double fraction_to_boundary = 0.99;
  double regularization = 1e-10;
};

enum class NlpStatus { kConverged, kMaxIterations, kFailed };

std::string to_string(NlpStatus status);

struct NlpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd y;       // equality multipliers
  Eigen::VectorXd lambda;  // inequality multipliers, >= 0
  double objective = 0.0;
  /// max of stationarity, feasibility and complementarity residuals.
  double kkt_residual = 0.0;
  double stationarity = 0.0;
  double primal_infeasibility = 0.0;
  int iterations = 0;
  NlpStatus status = NlpStatus::kFailed;
};

/// Primal-dual barrier method with slacks, l1 merit backtracking and a
/// monotone barrier schedule. z0 need not be feasible.
NlpResult solve_interior_point(const NlpFunctions& nlp, const Eigen::VectorXd& z0,
                               const InteriorPointOptions& options = {});

}  // namespace rigcov
