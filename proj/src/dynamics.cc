#include "rigcov/dynamics.h"

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "rigcov/error.h"
#include "rigcov/rng.h"

namespace rigcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoxConstraints velocity_input_box(int dim, double v_max, double u_max) {
  if (!(v_max > 0.0) || !(u_max > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "v_max and u_max must be positive");
  }
  BoxConstraints box;
  box.x_lower = Eigen::VectorXd::Constant(2 * dim, -kInf);
  box.x_upper = Eigen::VectorXd::Constant(2 * dim, kInf);
  box.x_lower.tail(dim).setConstant(-v_max);
  box.x_upper.tail(dim).setConstant(v_max);
  box.u_lower = Eigen::VectorXd::Constant(dim, -u_max);
  box.u_upper = Eigen::VectorXd::Constant(dim, u_max);
  return box;
}

void check_dim_and_step(int dim, double h) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::kInvalidInput, "model dimension must be 2 or 3");
  if (!(h > 0.0)) throw Error(ErrorKind::kInvalidInput, "time step must be positive");
}

// Finite sample range for free coordinates.
double sample_coord(Rng& rng, double lo, double hi) {
  lo = std::isfinite(lo) ? lo : -10.0;
  hi = std::isfinite(hi) ? hi : 10.0;
  return rng.uniform(lo, hi);
}

Eigen::VectorXd sample_box(Rng& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd out(lo.size());
  for (Eigen::Index k = 0; k < lo.size(); ++k) out(k) = sample_coord(rng, lo(k), hi(k));
  return out;
}

}  // namespace

bool BoxConstraints::contains_state(const Eigen::VectorXd& x, double tol) const {
  return ((x - x_upper).array() <= tol).all() && ((x_lower - x).array() <= tol).all();
}

bool BoxConstraints::contains_input(const Eigen::VectorXd& u, double tol) const {
  return ((u - u_upper).array() <= tol).all() && ((u_lower - u).array() <= tol).all();
}

Eigen::MatrixXd RobotModel::output_matrix() const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(position_dim(), state_dim());
  c.leftCols(position_dim()).setIdentity();
  return c;
}

DoubleIntegrator::DoubleIntegrator(const DoubleIntegratorParams& params)
    : params_(params) {
  check_dim_and_step(params.dim, params.h);
  box_ = velocity_input_box(params.dim, params.v_max, params.u_max);
}

Eigen::VectorXd DoubleIntegrator::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  const int d = params_.dim;
  Eigen::VectorXd next(2 * d);
  next.head(d) = x.head(d) + params_.h * x.tail(d);
  next.tail(d) = x.tail(d) + params_.h * u;
  return next;
}

std::optional<Linearization> DoubleIntegrator::analytic_jacobians(const Eigen::VectorXd&,
                                                                  const Eigen::VectorXd&) const {
  const int d = params_.dim;
  Linearization lin;
  lin.A = Eigen::MatrixXd::Identity(2 * d, 2 * d);
  lin.A.topRightCorner(d, d) = params_.h * Eigen::MatrixXd::Identity(d, d);
  lin.B = Eigen::MatrixXd::Zero(2 * d, d);
  lin.B.bottomRows(d) = params_.h * Eigen::MatrixXd::Identity(d, d);
  return lin;
}

DragDoubleIntegrator::DragDoubleIntegrator(const DragParams& params) : params_(params) {
  check_dim_and_step(params.dim, params.h);
  if (!(params.kappa >= 0.0)) throw Error(ErrorKind::kInvalidInput, "drag kappa must be >= 0");
  box_ = velocity_input_box(params.dim, params.v_max, params.u_max);
}

Eigen::VectorXd DragDoubleIntegrator::step(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& u) const {
  const int d = params_.dim;
  const Eigen::VectorXd v = x.tail(d);
  Eigen::VectorXd next(2 * d);
  next.head(d) = x.head(d) + params_.h * v;
  next.tail(d) = v + params_.h * (u - params_.kappa * v.norm() * v);
  return next;
}

std::optional<Linearization> DragDoubleIntegrator::analytic_jacobians(
    const Eigen::VectorXd& x, const Eigen::VectorXd&) const {
  const int d = params_.dim;
  const Eigen::VectorXd v = x.tail(d);
  const double speed = v.norm();
  // d(|v| v)/dv = |v| I + v v^T / |v|, which vanishes at rest.
  Eigen::MatrixXd drag = Eigen::MatrixXd::Zero(d, d);
  if (speed > 0.0) {
    drag = speed * Eigen::MatrixXd::Identity(d, d) + v * v.transpose() / speed;
  }
  Linearization lin;
  lin.A = Eigen::MatrixXd::Identity(2 * d, 2 * d);
  lin.A.topRightCorner(d, d) = params_.h * Eigen::MatrixXd::Identity(d, d);
  lin.A.bottomRightCorner(d, d) -= params_.h * params_.kappa * drag;
  lin.B = Eigen::MatrixXd::Zero(2 * d, d);
  lin.B.bottomRows(d) = params_.h * Eigen::MatrixXd::Identity(d, d);
  return lin;
}

Linearization finite_difference_jacobians(const RobotModel& model, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& u, double step) {
  const int nx = model.state_dim();
  const int nu = model.input_dim();
  Linearization lin{Eigen::MatrixXd(nx, nx), Eigen::MatrixXd(nx, nu)};
  for (int k = 0; k < nx; ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += step;
    xm(k) -= step;
    lin.A.col(k) = (model.step(xp, u) - model.step(xm, u)) / (2.0 * step);
  }
  for (int k = 0; k < nu; ++k) {
    Eigen::VectorXd up = u, um = u;
    up(k) += step;
    um(k) -= step;
    lin.B.col(k) = (model.step(x, up) - model.step(x, um)) / (2.0 * step);
  }
  return lin;
}

Linearization linearize(const RobotModel& model, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& u) {
  if (auto lin = model.analytic_jacobians(x, u)) return *lin;
  return finite_difference_jacobians(model, x, u);
}

SteadyState steady_state_from_position(const RobotModel& model, const Eigen::VectorXd& r) {
  const int nx = model.state_dim();
  const int nu = model.input_dim();
  const int d = model.position_dim();
  if (r.size() != d || !r.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "steady-state position has wrong size");
  }
  const Eigen::MatrixXd c = model.output_matrix();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nu);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd residual(nx + d);
    residual.head(nx) = model.step(x, u) - x;
    residual.tail(d) = c * x - r;
    if (residual.lpNorm<Eigen::Infinity>() < 1e-12) {
      return {x, u, c * x};
    }
    const Linearization lin = linearize(model, x, u);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nx + d, nx + nu);
    jac.topLeftCorner(nx, nx) = lin.A - Eigen::MatrixXd::Identity(nx, nx);
    jac.topRightCorner(nx, nu) = lin.B;
    jac.bottomLeftCorner(d, nx) = c;
    const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(-residual);
    x += delta.head(nx);
    u += delta.tail(nu);
  }
  throw Error(ErrorKind::kNoSteadyState, "Newton did not converge in 50 iterations");
}

Eigen::VectorXd position_shift(const RobotModel& model, const Eigen::VectorXd& p) {
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(model.state_dim());
  psi.head(model.position_dim()) = p;
  return psi;
}

InvarianceReport position_invariance_check(const RobotModel& model, int n_samples,
                                           std::uint64_t seed) {
  Rng rng(seed);
  const BoxConstraints& box = model.constraints();
  InvarianceReport report;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd x = sample_box(rng, box.x_lower, box.x_upper);
    const Eigen::VectorXd u = sample_box(rng, box.u_lower, box.u_upper);
    Eigen::VectorXd p(model.position_dim());
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = rng.uniform(-10.0, 10.0);
    const Eigen::VectorXd psi = position_shift(model, p);
    const double violation =
        (model.step(x + psi, u) - model.step(x, u) - psi).lpNorm<Eigen::Infinity>();
    report.worst_violation = std::max(report.worst_violation, violation);
  }
  report.ok = report.worst_violation <= 1e-9;
  return report;
}

double empirical_lipschitz(const RobotModel& model, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  const BoxConstraints& box = model.constraints();
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd x1 = sample_box(rng, box.x_lower, box.x_upper);
    const Eigen::VectorXd x2 = sample_box(rng, box.x_lower, box.x_upper);
    const Eigen::VectorXd u = sample_box(rng, box.u_lower, box.u_upper);
    const double dx = (x1 - x2).norm();
    if (dx == 0.0) continue;
    worst = std::max(worst, (model.step(x1, u) - model.step(x2, u)).norm() / dx);
  }
  return worst;
}

}  // namespace rigcov
