#include <gtest/gtest.h>

#include <cmath>

#include "rigcov/error.h"
#include "rigcov/mpc.h"
#include "rigcov/rng.h"

namespace rigcov {
namespace {

CostWeights weights(double mu, double w_b) {
  CostWeights w;
  w.Q = Eigen::Vector4d(0.1, 0.1, 0.01, 0.01).asDiagonal();
  w.R = 1e-3 * Eigen::Matrix2d::Identity();
  w.S_r = Eigen::Matrix2d::Identity();
  w.w_b = w_b;
  w.mu = mu;
  return w;
}

OcpProblem problem(const ModelPtr& m, const Eigen::Vector2d& r_ref, const Eigen::VectorXd& x0,
                   double mu = 1.0, double w_b = 0.0) {
  OcpProblem p;
  p.model = m;
  p.horizon = 10;
  p.weights = weights(mu, w_b);
  p.terminal = design_terminal_set(*m, p.weights.Q, p.weights.R, Eigen::Vector2d::Zero());
  p.x0 = x0;
  p.r_ref = r_ref;
  return p;
}

// Dense grid minimiser of offset_cost over the region's bounding box.
Eigen::Vector2d grid_minimiser(const OcpProblem& p, const ConvexRegion& region, int m) {
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const Point& v : region.vertices()) {
    lo_x = std::min(lo_x, v.x());
    hi_x = std::max(hi_x, v.x());
    lo_y = std::min(lo_y, v.y());
    hi_y = std::max(hi_y, v.y());
  }
  double best = 1e300;
  Eigen::Vector2d arg = Eigen::Vector2d::Zero();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Eigen::Vector2d r(lo_x + (hi_x - lo_x) * a / (m - 1), lo_y + (hi_y - lo_y) * b / (m - 1));
      if (!region.contains(r, 1e-12)) continue;
      const double c = offset_cost(r, p.r_ref, p.bearings, p.weights);
      if (c < best) {
        best = c;
        arg = r;
      }
    }
  }
  return arg;
}

TEST(BearingCost, HandValues) {
  NeighborBearing nb;
  nb.desired = Eigen::Vector2d(1, 0);
  nb.anchor = Eigen::Vector2d(0, 0);
  EXPECT_NEAR(bearing_cost(Eigen::Vector2d(2, 3), {nb}, 2.5), 2.5 * 9, 1e-14);
  EXPECT_NEAR(bearing_cost(Eigen::Vector2d(-4, 0), {nb}, 2.5), 0.0, 1e-14);
}

TEST(OffsetOptimum, SpecialCases) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  OcpProblem p = problem(m, Eigen::Vector2d(0.3, 0.6), Eigen::Vector4d(0.3, 0.6, 0, 0));
  const ConvexRegion region = ConvexRegion::unit_square().shrunk(0.05);
  EXPECT_LT((offset_optimum(p.r_ref, {}, p.weights, region) - p.r_ref).norm(), 1e-12);

  NeighborBearing nb;
  nb.desired = Eigen::Vector2d(0, 1);
  nb.anchor = Eigen::Vector2d(0.8, 0.1);
  p.bearings = {nb};
  p.r_ref = Eigen::Vector2d(1.4, -0.3);
  EXPECT_LT((offset_optimum(p.r_ref, p.bearings, p.weights, region) - Eigen::Vector2d(0.95, 0.05)).norm(),
            1e-12);
}

TEST(OffsetOptimum, MatchesGridSearch) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  Rng rng(8);
  const ConvexRegion region(Polygon{{0.1, 0.1}, {0.9, 0.2}, {0.8, 0.9}, {0.2, 0.7}});
  for (int trial = 0; trial < 10; ++trial) {
    OcpProblem p = problem(m, Eigen::Vector2d(rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)),
                           Eigen::Vector4d::Zero(), rng.uniform(0.05, 1.0), 1.0);
    for (int j = 0; j < 3; ++j) {
      NeighborBearing nb;
      const double th = rng.uniform(0, 2 * M_PI);
      nb.desired = Eigen::Vector2d(std::cos(th), std::sin(th));
      nb.anchor = Eigen::Vector2d(rng.uniform(), rng.uniform());
      p.bearings.push_back(nb);
    }
    const Eigen::Vector2d exact = offset_optimum(p.r_ref, p.bearings, p.weights, region);
    const Eigen::Vector2d grid = grid_minimiser(p, region, 200);
    EXPECT_TRUE(region.contains(exact, 1e-12));
    EXPECT_LT((exact - grid).norm(), 2 * 1.0 / 199 + 1e-12);
    EXPECT_LE(offset_cost(exact, p.r_ref, p.bearings, p.weights),
              offset_cost(grid, p.r_ref, p.bearings, p.weights) + 1e-12);
  }
}

TEST(Ocp, AtSteadyStateNothingHappens) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  const OcpProblem p = problem(m, Eigen::Vector2d(0.4, 0.4), Eigen::Vector4d(0.4, 0.4, 0, 0));
  const OcpSolution s = solve_ocp(p);
  ASSERT_EQ(s.status, OcpStatus::kSolved);
  EXPECT_LT(s.cost, 1e-8);
  for (const Eigen::VectorXd& u : s.u_seq) EXPECT_LT(u.norm(), 1e-5);
}

TEST(Ocp, SteadyStateCostIsOffsetCost) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  OcpProblem p = problem(m, Eigen::Vector2d(0.5, 0.5), Eigen::Vector4d::Zero(), 0.6, 1.0);
  NeighborBearing nb;
  nb.desired = Eigen::Vector2d(1, 1).normalized();
  nb.anchor = Eigen::Vector2d(0.2, 0.5);
  p.bearings = {nb};
  p.feasible_setpoints = ConvexRegion::unit_square().shrunk(0.01);
  const Eigen::Vector2d rd = offset_optimum(p.r_ref, p.bearings, p.weights, p.feasible_setpoints);
  p.x0 = Eigen::Vector4d(rd.x(), rd.y(), 0, 0);
  const OcpSolution s = solve_ocp(p);
  ASSERT_EQ(s.status, OcpStatus::kSolved);
  EXPECT_NEAR(s.cost, offset_cost(rd, p.r_ref, p.bearings, p.weights), 1e-6);
  EXPECT_LT((s.rbar - rd).norm(), 1e-5);
}

TEST(Ocp, FullMuIgnoresBearings) {
  const ModelPtr m = std::make_shared<DragDoubleIntegrator>();
  OcpProblem p = problem(m, Eigen::Vector2d(0.7, 0.3), Eigen::Vector4d(0.2, 0.2, 0.1, 0), 1.0, 1.0);
  NeighborBearing nb;
  nb.desired = Eigen::Vector2d(0, 1);
  nb.anchor = Eigen::Vector2d(0.1, 0.1);
  p.bearings = {nb};
  const OcpSolution a = solve_ocp(p);
  nb.desired = Eigen::Vector2d(1, 0);
  p.bearings = {nb};
  const OcpSolution b = solve_ocp(p);
  ASSERT_EQ(a.status, OcpStatus::kSolved);
  ASSERT_EQ(b.status, OcpStatus::kSolved);
  EXPECT_LT((a.rbar - b.rbar).norm(), 1e-8);
}

TEST(Ocp, SolutionIsFeasibleAndWarmStartShifts) {
  const ModelPtr m = std::make_shared<DragDoubleIntegrator>();
  const OcpProblem p = problem(m, Eigen::Vector2d(0.8, 0.7), Eigen::Vector4d(0.1, 0.2, 0, 0.3));
  const OcpSolution s = solve_ocp(p);
  ASSERT_EQ(s.status, OcpStatus::kSolved);
  EXPECT_TRUE(check_feasibility(p, s).ok());
  EXPECT_EQ(s.u_seq.size(), 10u);
  EXPECT_EQ(s.x_seq.size(), 11u);
  EXPECT_LT((m->step(s.xbar, s.ubar) - s.xbar).norm(), 1e-7);

  const Eigen::VectorXd x1 = m->step(p.x0, s.u_seq[0]);
  const OcpSolution cand = shift_warm_start(p, s, x1);
  OcpProblem next = p;
  next.x0 = x1;
  EXPECT_TRUE(check_feasibility(next, cand).ok());
  const OcpSolution s1 = solve_ocp(next, cand);
  EXPECT_LE(s1.cost, cand.cost + 1e-6);
}

TEST(Ocp, ShiftAtSteadyStateAppendsUbar) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  const OcpProblem p = problem(m, Eigen::Vector2d(0.4, 0.4), Eigen::Vector4d(0.4, 0.4, 0, 0));
  const OcpSolution s = solve_ocp(p);
  const OcpSolution cand = shift_warm_start(p, s, s.x_seq[1]);
  EXPECT_LT((cand.u_seq.back() - s.ubar).norm(), 1e-6);
}

TEST(Ocp, Validation) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  OcpProblem p = problem(m, Eigen::Vector2d(0.4, 0.4), Eigen::Vector4d(0.4, 0.4, 0, 0));
  p.weights.mu = 0.0;
  EXPECT_THROW(solve_ocp(p), Error);
  p = problem(m, Eigen::Vector2d(0.4, 0.4), Eigen::Vector4d(0.4, 0.4, 0, 0));
  p.weights.R = Eigen::Matrix2d::Zero();
  EXPECT_THROW(solve_ocp(p), Error);
}

TEST(ClosedLoop, ConvergesToFeasibleReference) {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  OcpProblem p = problem(m, Eigen::Vector2d(0.7, 0.6), Eigen::Vector4d(0.2, 0.3, 0, 0));
  std::optional<OcpSolution> warm;
  std::optional<OcpSolution> prev;
  bool reached = false;
  for (int k = 0; k < 60; ++k) {
    auto [u, sol] = mpc_step(p, warm);
    if (prev) {
      const Eigen::VectorXd ex = prev->x_seq[0] - prev->xbar;
      const Eigen::VectorXd eu = prev->u_seq[0] - prev->ubar;
      const double stage = ex.dot(p.weights.Q * ex) + eu.dot(p.weights.R * eu);
      EXPECT_LE(sol.cost - prev->cost, -stage + 1e-5) << k;
    }
    prev = sol;
    const Eigen::VectorXd x1 = m->step(p.x0, u);
    warm = shift_warm_start(p, sol, x1);
    p.x0 = x1;
    if ((x1.head(2) - p.r_ref).norm() < 1e-3) reached = true;
  }
  EXPECT_TRUE(reached);
}

}  // namespace
}  // namespace rigcov
