#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "rigcov/dynamics.h"

namespace rigcov {

/// K = -(R + B^T P B)^-1 B^T P A from the fixed point of the Riccati
/// recursion, so that u = K x stabilises x' = A x + B u. Throws
/// not-stabilizable after 10^4 iterations.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& M);

/// Solves (A_K / sqrt(1 - c))^T P (A_K / sqrt(1 - c)) - P = -Q_star through
/// the Kronecker form. Throws invalid-scaling unless 0 <= c < 1 - rho(A_K)^2.
Eigen::MatrixXd lyapunov_P(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& Q_star, double c);

/// Residual |A~^T P A~ - P + Q_star|_inf of the scaled equation.
double lyapunov_residual(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& P,
                         const Eigen::MatrixXd& Q_star, double c);

/// Ellipsoid {x : (x - xbar)^T P (x - xbar) <= zeta} with the local law
/// kappa(x) = ubar + K (x - xbar).
struct TerminalSet {
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  double zeta = 0.0;
  double c = 0.0;
  SteadyState steady;
  Eigen::MatrixXd Q, R, Q_star;
  Eigen::MatrixXd A, B;

  Eigen::VectorXd control(const Eigen::VectorXd& x) const {
    return steady.u + K * (x - steady.x);
  }
  double level(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd e = x - steady.x;
    return e.dot(P * e);
  }
  /// Same K, P and zeta around the steady state at position r.
  TerminalSet recentred(const RobotModel& model, const Eigen::VectorXd& r) const;
};

struct TerminalOptions {
  /// c = c_fraction * (1 - rho(A_K)^2).
  double c_fraction = 0.5;
  int directions = 512;
  int bisection_iterations = 40;
  std::uint64_t seed = 7;
};

/// Per-point check: constraints of (x, kappa(x)) and the one-step decrease
/// V(f(x, kappa(x))) - V(x) <= -l(x - xbar, kappa(x) - ubar) + 1e-9.
bool terminal_conditions_hold(const RobotModel& model, const TerminalSet& ts,
                              const Eigen::VectorXd& x);

/// One-step decrease slack, positive when the inequality is violated.
double terminal_decrease_gap(const RobotModel& model, const TerminalSet& ts,
                             const Eigen::VectorXd& x);

/// Largest level passing the sampled checks, capped by the exact box bound
/// margin^2 / (a^T P^-1 a) of every constraint row. Throws terminal-set-empty
/// when nothing positive passes.
double size_terminal_set(const RobotModel& model, const TerminalSet& ts,
                         const TerminalOptions& options = {});

bool in_terminal_set(const Eigen::VectorXd& x, const Eigen::VectorXd& rbar,
                     const TerminalSet& ts, const Eigen::MatrixXd& C);

/// Linearise at the steady state of position r, then LQR, Lyapunov and sizing.
TerminalSet design_terminal_set(const RobotModel& model, const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R, const Eigen::VectorXd& r,
                                const TerminalOptions& options = {});

}  // namespace rigcov
