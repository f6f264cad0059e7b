#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rigcov/dynamics.h"
#include "rigcov/geometry.h"
#include "rigcov/interior_point.h"
#include "rigcov/terminal.h"

namespace rigcov {

struct CostWeights {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::MatrixXd S_r;
  double w_b = 0.0;
  double mu = 1.0;

  /// Throws invalid-input unless Q >= 0, R > 0, S_r > 0, w_b >= 0, 0 < mu <= 1.
  void validate(int nx, int nu, int d) const;
};

/// Desired bearing toward one neighbour and the neighbour's anchor position.
struct NeighborBearing {
  int neighbor = -1;
  Eigen::Vector2d desired = Eigen::Vector2d::UnitX();
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
};

struct OcpProblem {
  ModelPtr model;
  int horizon = 10;
  CostWeights weights;
  /// K, P and zeta; the steady state inside is ignored and replaced by the
  /// decision variables.
  TerminalSet terminal;
  Eigen::VectorXd x0;
  Eigen::Vector2d r_ref = Eigen::Vector2d::Zero();
  std::vector<NeighborBearing> bearings;
  ConvexRegion feasible_setpoints = ConvexRegion::unit_square();
  InteriorPointOptions solver;
};

enum class OcpStatus { kSolved, kMaxIterations, kInfeasible };

std::string to_string(OcpStatus status);

struct OcpSolution {
  /// u_0 .. u_{N-1}
  std::vector<Eigen::VectorXd> u_seq;
  /// x_0 .. x_N
  std::vector<Eigen::VectorXd> x_seq;
  Eigen::VectorXd xbar;
  Eigen::VectorXd ubar;
  Eigen::Vector2d rbar = Eigen::Vector2d::Zero();
  double cost = 0.0;
  OcpStatus status = OcpStatus::kInfeasible;
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// w_b sum_j |(I - g_j g_j^T)(rbar - anchor_j)|^2.
double bearing_cost(const Eigen::Vector2d& rbar, const std::vector<NeighborBearing>& bearings,
                    double w_b);

/// mu (r_ref - r)^T S_r (r_ref - r) + (1 - mu) bearing_cost(r).
double offset_cost(const Eigen::Vector2d& r, const Eigen::Vector2d& r_ref,
                   const std::vector<NeighborBearing>& bearings, const CostWeights& weights);

/// Exact minimiser of offset_cost over the region.
Eigen::Vector2d offset_optimum(const Eigen::Vector2d& r_ref,
                               const std::vector<NeighborBearing>& bearings,
                               const CostWeights& weights, const ConvexRegion& region);

/// Objective of the tracking problem at a given trajectory and artificial
/// steady state.
double ocp_cost(const OcpProblem& problem, const std::vector<Eigen::VectorXd>& x_seq,
                const std::vector<Eigen::VectorXd>& u_seq, const Eigen::VectorXd& xbar,
                const Eigen::VectorXd& ubar);

/// Worst violations of a candidate: model equations (initial state, shooting
/// and steady state) and inequalities (boxes, terminal ellipsoid, setpoint
/// region).
struct FeasibilityReport {
  double dynamics = 0.0;
  double constraints = 0.0;

  bool ok(double dynamics_tol = 1e-7, double constraint_tol = 1e-9) const {
    return dynamics < dynamics_tol && constraints <= constraint_tol;
  }
};

FeasibilityReport check_feasibility(const OcpProblem& problem, const OcpSolution& candidate);

/// Steady state at the current position (projected onto the setpoint region)
/// with the terminal law rolled out from x0.
OcpSolution cold_start(const OcpProblem& problem);

/// Solves the tracking problem by multiple shooting. A missing warm start
/// means cold_start.
OcpSolution solve_ocp(const OcpProblem& problem,
                      const std::optional<OcpSolution>& warm = std::nullopt);

/// Drops u_0, appends kappa(x_N) and rolls the inputs out from `x_next`.
/// Throws recursive-feasibility-violation when the candidate violates any
/// constraint by more than 1e-9.
OcpSolution shift_warm_start(const OcpProblem& problem, const OcpSolution& prev,
                             const Eigen::VectorXd& x_next);

/// First input of solve_ocp. Throws infeasible unless the solve verified.
std::pair<Eigen::VectorXd, OcpSolution> mpc_step(const OcpProblem& problem,
                                                 const std::optional<OcpSolution>& warm);

}  // namespace rigcov
