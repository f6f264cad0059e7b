#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace rigcov {

/// Axis-aligned bounds on states and inputs; +-infinity marks a free
/// coordinate.
struct BoxConstraints {
  Eigen::VectorXd x_lower, x_upper;
  Eigen::VectorXd u_lower, u_upper;

  bool contains_state(const Eigen::VectorXd& x, double tol = 0.0) const;
  bool contains_input(const Eigen::VectorXd& u, double tol = 0.0) const;
};

struct Linearization {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

/// Discrete-time model x' = f(x, u) whose first `position_dim` state
/// coordinates are the position.
class RobotModel {
 public:
  virtual ~RobotModel() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual int position_dim() const = 0;

  virtual Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const = 0;

  /// Analytic Jacobians where the model provides them.
  virtual std::optional<Linearization> analytic_jacobians(const Eigen::VectorXd& x,
                                                          const Eigen::VectorXd& u) const {
    (void)x;
    (void)u;
    return std::nullopt;
  }

  virtual const BoxConstraints& constraints() const = 0;

  /// d x n_x selector of the position.
  Eigen::MatrixXd output_matrix() const;
  Eigen::VectorXd position(const Eigen::VectorXd& x) const { return x.head(position_dim()); }
};

using ModelPtr = std::shared_ptr<const RobotModel>;

struct DoubleIntegratorParams {
  int dim = 2;
  double h = 0.1;
  double u_max = 2.0;
  double v_max = 1.0;
};

/// p' = p + h v, v' = v + h u.
class DoubleIntegrator : public RobotModel {
 public:
  explicit DoubleIntegrator(const DoubleIntegratorParams& params = {});

  std::string name() const override { return "double_integrator"; }
  int state_dim() const override { return 2 * params_.dim; }
  int input_dim() const override { return params_.dim; }
  int position_dim() const override { return params_.dim; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  std::optional<Linearization> analytic_jacobians(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& u) const override;
  const BoxConstraints& constraints() const override { return box_; }
  const DoubleIntegratorParams& params() const { return params_; }

 private:
  DoubleIntegratorParams params_;
  BoxConstraints box_;
};

struct DragParams {
  int dim = 2;
  double h = 0.1;
  double u_max = 2.0;
  double v_max = 1.0;
  double kappa = 0.5;
};

/// p' = p + h v, v' = v + h (u - kappa |v| v).
class DragDoubleIntegrator : public RobotModel {
 public:
  explicit DragDoubleIntegrator(const DragParams& params = {});

  std::string name() const override { return "drag"; }
  int state_dim() const override { return 2 * params_.dim; }
  int input_dim() const override { return params_.dim; }
  int position_dim() const override { return params_.dim; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  std::optional<Linearization> analytic_jacobians(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& u) const override;
  const BoxConstraints& constraints() const override { return box_; }
  const DragParams& params() const { return params_; }

 private:
  DragParams params_;
  BoxConstraints box_;
};

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Central differences of the step map.
Linearization finite_difference_jacobians(const RobotModel& model, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& u,
                                          double step = kFiniteDifferenceStep);

/// Analytic Jacobians when available, finite differences otherwise.
Linearization linearize(const RobotModel& model, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& u);

struct SteadyState {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd r;
};

/// Newton on [f(x, u) - x; C x - r] from the zero state. Throws
/// no-steady-state after 50 iterations without convergence.
SteadyState steady_state_from_position(const RobotModel& model, const Eigen::VectorXd& r);

/// psi(p) = [p; 0].
Eigen::VectorXd position_shift(const RobotModel& model, const Eigen::VectorXd& p);

struct InvarianceReport {
  bool ok = true;
  double worst_violation = 0.0;
};

/// Samples f(x + psi(p), u) - f(x, u) - psi(p) over random (x, u, p).
InvarianceReport position_invariance_check(const RobotModel& model, int n_samples,
                                           std::uint64_t seed);

/// Largest sampled |f(x1, u) - f(x2, u)| / |x1 - x2| over the constraint box
/// (positions drawn from [-10, 10]).
double empirical_lipschitz(const RobotModel& model, int n_samples, std::uint64_t seed);

}  // namespace rigcov
