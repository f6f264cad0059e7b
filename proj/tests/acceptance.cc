#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "rigcov/bearing.h"
#include "rigcov/config.h"
#include "rigcov/coverage.h"
#include "rigcov/error.h"
#include "rigcov/graph.h"
#include "rigcov/io.h"
#include "rigcov/mpc.h"
#include "rigcov/recovery.h"
#include "rigcov/rng.h"
#include "rigcov/sim.h"
#include "rigcov/terminal.h"

using namespace rigcov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", secs);
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << " (" << o.detail << ", " << buf
            << ")" << std::endl;
}

std::string fmt(double v) { return format_number(v); }

Configuration random_config(int n, Rng& rng) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Eigen::Vector2d(rng.uniform(), rng.uniform()));
  return Configuration(2, pts);
}

CostWeights sim_weights(double mu, double w_b) {
  const SimConfig d = default_config(1);
  return CostWeights{d.mpc.Q, d.mpc.R, d.mpc.S_r, w_b, mu};
}

Outcome laman_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  int bad = 0, total = 0;
  for (int n = 3; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Graph g = henneberg_generate(n, seed, 0.5).graph;
      ++total;
      if (g.num_edges() != 2 * n - 3 || !laman_check(g).is_laman) ++bad;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {bad == 0 && secs < 10.0, std::to_string(total - bad) + "/" + std::to_string(total) + " Laman"};
}

Outcome generic_rank() {
  Rng rng(2024);
  int bad_rank = 0, total = 0;
  double worst = 0.0;
  for (int n = 3; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Graph g = henneberg_generate(n, seed, 0.5).graph;
      const Framework fw(g, random_config(n, rng));
      ++total;
      if (rigidity_rank(fw, 1e-8).rank != 2 * n - 3) ++bad_rank;
      const Eigen::MatrixXd R = rigidity_matrix(fw);
      const Eigen::MatrixXd T = trivial_motions(fw.config());
      for (Eigen::Index c = 0; c < T.cols(); ++c) {
        worst = std::max(worst, (R * T.col(c)).norm() / T.col(c).norm());
      }
    }
  }
  return {bad_rank == 0 && worst <= 1e-9,
          std::to_string(total - bad_rank) + "/" + std::to_string(total) + " full rank, null residual " +
              fmt(worst)};
}

Outcome jacobian_fd() {
  Rng rng(99);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + t % 6;
    const Graph g = henneberg_generate(n, 500 + t, 0.5).graph;
    const Framework fw(g, random_config(n, rng));
    const Eigen::MatrixXd R = rigidity_matrix(fw);
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < R.cols(); ++c) {
      Eigen::VectorXd plus = fw.config().stacked(), minus = plus;
      plus(c) += h;
      minus(c) -= h;
      const Eigen::VectorXd col = (bearing_function(Framework(g, Configuration(2, plus))).stacked() -
                                   bearing_function(Framework(g, Configuration(2, minus))).stacked()) /
                                  (2 * h);
      worst = std::max(worst, (R.col(c) - col).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-6, "max abs deviation " + fmt(worst)};
}

Outcome recovery_soundness() {
  Rng rng(77);
  int cases = 0, bad = 0;
  for (int t = 0; t < 30; ++t) {
    const int n = 4 + t % 7;
    const Graph g = henneberg_generate(n, 1000 + t, 0.6).graph;
    for (int v = 0; v < n; ++v) {
      const int alpha = g.degree(v);
      if (alpha < 2) continue;
      ++cases;
      const ClosingRanks r = closing_ranks(g, v);
      const std::vector<int> nb = g.neighbors(v);
      bool ok = static_cast<int>(r.new_edges.size()) == alpha - 2;
      for (const Edge& e : r.new_edges) {
        ok = ok && std::find(nb.begin(), nb.end(), e.i) != nb.end() &&
             std::find(nb.begin(), nb.end(), e.j) != nb.end();
      }
      const Graph repaired = apply_repair(g, v, r.new_edges);
      ok = ok && laman_check(repaired).is_laman;
      ok = ok && is_infinitesimally_bearing_rigid(Framework(repaired, random_config(n - 1, rng)));
      if (!ok) ++bad;
    }
  }
  const Graph hub(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  const ClosingRanks f = closing_ranks(hub, 0);
  const bool hub_ok = f.new_edges == std::vector<Edge>{{1, 3}, {1, 4}, {1, 5}};
  std::string edges;
  for (const Edge& e : f.new_edges) edges += "(v" + std::to_string(e.i) + ",v" + std::to_string(e.j) + ")";
  return {bad == 0 && hub_ok,
          std::to_string(cases - bad) + "/" + std::to_string(cases) + " repairs sound, five-neighbour hub " + edges};
}

Outcome lyapunov() {
  const double p = lyapunov_P(Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 1.0), 0.5)(0, 0);
  Rng rng(5);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int nx = 2 + t % 4, nu = 1 + t % 2;
    Eigen::MatrixXd A(nx, nx), B(nx, nu);
    for (Eigen::Index k = 0; k < A.size(); ++k) A(k) = rng.normal() * 0.6;
    for (Eigen::Index k = 0; k < B.size(); ++k) B(k) = rng.normal();
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(nx, nx);
    const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(nu, nu);
    const Eigen::MatrixXd K = lqr_gain(A, B, Q, R);
    const Eigen::MatrixXd AK = A + B * K;
    const double rho = spectral_radius(AK);
    const double c = 0.5 * (1 - rho * rho);
    const Eigen::MatrixXd Qs = Q + K.transpose() * R * K;
    worst = std::max(worst, lyapunov_residual(AK, lyapunov_P(AK, Qs, c), Qs, c));
  }
  return {p == 2.0 && worst < 1e-10, "scalar P = " + fmt(p) + ", worst residual " + fmt(worst)};
}

Outcome terminal_invariance() {
  std::ostringstream detail;
  bool ok = true;
  const SimConfig d = default_config(1);
  for (const char* type : {"double_integrator", "drag"}) {
    ModelConfig mc;
    mc.type = type;
    const ModelPtr m = mc.build();
    const TerminalSet ts = design_terminal_set(*m, d.mpc.Q, d.mpc.R, Eigen::Vector2d(0.4, 0.6));
    const Eigen::LLT<Eigen::MatrixXd> llt(ts.P);
    const Eigen::MatrixXd Uinv = llt.matrixU().solve(Eigen::MatrixXd::Identity(4, 4));
    Rng rng(31);
    int escaped = 0, violated = 0;
    double worst_gap = -1e300;
    for (int s = 0; s < 10000; ++s) {
      Eigen::Vector4d z;
      for (int k = 0; k < 4; ++k) z(k) = rng.normal();
      z *= std::pow(rng.uniform(), 0.25) / z.norm();
      const Eigen::VectorXd x = ts.steady.x + std::sqrt(ts.zeta) * Uinv * z;
      const Eigen::VectorXd u = ts.control(x);
      const Eigen::VectorXd next = m->step(x, u);
      if (!m->constraints().contains_state(x, 1e-12) || !m->constraints().contains_input(u, 1e-12) ||
          ts.level(next) > ts.zeta) {
        ++escaped;
      }
      const Eigen::VectorXd e = x - ts.steady.x, v = u - ts.steady.u;
      const double gap = ts.level(next) - ts.level(x) + e.dot(ts.Q * e) + v.dot(ts.R * v);
      worst_gap = std::max(worst_gap, gap);
      if (gap > 1e-9) ++violated;
    }
    ok = ok && escaped == 0 && violated == 0;
    detail << type << ": zeta " << fmt(ts.zeta) << ", " << escaped << " escaped, worst decrease gap "
           << fmt(worst_gap) << "; ";
  }
  std::string s = detail.str();
  return {ok, s.substr(0, s.size() - 2)};
}

Outcome feasible_tracking() {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  OcpProblem p;
  p.model = m;
  p.horizon = 10;
  p.weights = sim_weights(1.0, 0.0);
  p.terminal = design_terminal_set(*m, p.weights.Q, p.weights.R, Eigen::Vector2d::Zero());
  p.feasible_setpoints = ConvexRegion::unit_square().shrunk(0.01);
  p.x0 = Eigen::Vector4d(0.15, 0.2, 0.0, 0.0);
  p.r_ref = Eigen::Vector2d(0.75, 0.65);
  std::optional<OcpSolution> warm, prev;
  int reached = -1;
  double worst_decrease = -1e300;
  for (int k = 0; k < 60; ++k) {
    auto [u, sol] = mpc_step(p, warm);
    if (prev) {
      const Eigen::VectorXd ex = prev->x_seq[0] - prev->xbar, eu = prev->u_seq[0] - prev->ubar;
      const double stage = ex.dot(p.weights.Q * ex) + eu.dot(p.weights.R * eu);
      worst_decrease = std::max(worst_decrease, sol.cost - prev->cost + stage);
    }
    prev = sol;
    const Eigen::VectorXd x1 = m->step(p.x0, u);
    warm = shift_warm_start(p, sol, x1);  // throws on a recursive-feasibility violation
    p.x0 = x1;
    if (reached < 0 && (x1.head(2) - p.r_ref).norm() < 1e-3) reached = k + 1;
  }
  const double final_err = (p.x0.head(2) - p.r_ref).norm();
  return {reached > 0 && final_err < 1e-3 && worst_decrease <= 1e-5,
          "within 1e-3 after " + std::to_string(reached) + " steps, final error " + fmt(final_err) +
              ", worst J decrease slack " + fmt(worst_decrease)};
}

Outcome infeasible_tracking() {
  const ModelPtr m = std::make_shared<DoubleIntegrator>();
  OcpProblem p;
  p.model = m;
  p.horizon = 10;
  p.weights = sim_weights(0.7, 1.0);
  p.terminal = design_terminal_set(*m, p.weights.Q, p.weights.R, Eigen::Vector2d::Zero());
  p.feasible_setpoints = ConvexRegion::unit_square().shrunk(0.01);
  p.x0 = Eigen::Vector4d(0.3, 0.3, 0.0, 0.0);
  p.r_ref = Eigen::Vector2d(1.3, 0.45);
  NeighborBearing nb;
  nb.neighbor = 1;
  nb.desired = Eigen::Vector2d(1.0, 1.0).normalized();
  nb.anchor = Eigen::Vector2d(0.4, 0.1);
  p.bearings = {nb};

  const Eigen::Vector2d target = offset_optimum(p.r_ref, p.bearings, p.weights, p.feasible_setpoints);
  // 200 x 200 grid over the admissible set
  const double lo = 0.01, hi = 0.99;
  double best = 1e300;
  Eigen::Vector2d grid_arg = Eigen::Vector2d::Zero();
  for (int a = 0; a < 200; ++a) {
    for (int b = 0; b < 200; ++b) {
      const Eigen::Vector2d r(lo + (hi - lo) * a / 199.0, lo + (hi - lo) * b / 199.0);
      const double c = offset_cost(r, p.r_ref, p.bearings, p.weights);
      if (c < best) {
        best = c;
        grid_arg = r;
      }
    }
  }
  const double spacing = (hi - lo) / 199.0;
  const bool grid_ok = (grid_arg - target).cwiseAbs().maxCoeff() <= spacing &&
                       offset_cost(target, p.r_ref, p.bearings, p.weights) <= best + 1e-12;

  std::optional<OcpSolution> warm;
  for (int k = 0; k < 300; ++k) {
    auto [u, sol] = mpc_step(p, warm);
    const Eigen::VectorXd x1 = m->step(p.x0, u);
    warm = shift_warm_start(p, sol, x1);
    p.x0 = x1;
  }
  const double err = (p.x0.head(2) - target).norm();
  return {grid_ok && err < 1e-3 && !p.feasible_setpoints.contains(p.r_ref),
          "target (" + fmt(target.x()) + ", " + fmt(target.y()) + "), grid argmin (" + fmt(grid_arg.x()) + ", " +
              fmt(grid_arg.y()) + "), final distance " + fmt(err)};
}

Outcome mu_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> bearing;
  double worst_rise = -1e300;
  std::ostringstream detail;
  for (double mu : {1.0, 0.7, 0.1}) {
    SimConfig c = default_config(1);
    c.mpc.mu = mu;
    const SimTrace t = run(c, RunOptions{0});
    double prev = std::nan("");
    for (const StepRecord& s : t.steps) {
      if (!s.partition_updated) continue;
      if (!std::isnan(prev)) worst_rise = std::max(worst_rise, s.coverage_cost - prev);
      prev = s.coverage_cost;
    }
    bearing.push_back(t.steps.back().bearing_error);
    detail << "mu " << fmt(mu) << ": H " << fmt(t.steps.back().coverage_cost) << " bearing "
           << fmt(t.steps.back().bearing_error) << "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ordered = bearing[0] > bearing[1] && bearing[1] > bearing[2];
  detail << "largest H rise at updates " << fmt(worst_rise);
  return {worst_rise <= 1e-8 && ordered && secs < 300.0, detail.str()};
}

Outcome fault_resilience() {
  SimConfig c = default_config(1);
  int victim = 0;
  for (int v = 0; v < c.graph.num_vertices(); ++v) {
    if (c.graph.degree(v) > c.graph.degree(victim)) victim = v;
  }
  c.faults = {{50, victim}};
  const SimTrace t = run(c, RunOptions{0});
  if (t.events.size() != 1) return {false, "no fault event recorded"};
  const FaultRecord& f = t.events[0];

  // fault-free five-robot run from the post-fault states and repaired graph
  const StepRecord& at = t.steps[50];
  SimConfig five = c;
  five.faults.clear();
  five.steps = c.steps - 50;
  five.robots.clear();
  std::map<int, int> index;
  for (const RobotRecord& r : at.robots) {
    index[r.id] = static_cast<int>(five.robots.size());
    RobotInit init = c.robots[r.id];
    init.position = r.state.head(2);
    init.velocity = r.state.segment(2, 2);
    five.robots.push_back(init);
  }
  five.graph = Graph(static_cast<int>(five.robots.size()));
  for (const auto& [a, b] : at.edges) five.graph.add_edge(index[a], index[b]);
  const SimTrace ref = run(five, RunOptions{0});

  const double h_fault = t.steps.back().coverage_cost;
  const double h_ref = ref.steps.back().coverage_cost;
  const double rel = std::abs(h_fault - h_ref) / h_ref;
  std::string edges;
  for (const auto& [a, b] : f.new_edges) edges += "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  return {!f.new_edges.empty() && f.laman_after && f.ibr_after && rel <= 0.05,
          "lost robot " + std::to_string(victim) + ", added " + edges + ", rank " + std::to_string(f.rank_after) +
              "/" + std::to_string(f.rank_bound_after) + ", H " + fmt(h_fault) + " vs " + fmt(h_ref) +
              " (rel " + fmt(rel) + ")"};
}

Outcome determinism() {
#ifndef RIGCOV_CLI_PATH
  return {false, "command line tool not built"};
#else
  const fs::path dir = fs::temp_directory_path() / "rigcov_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  write_text_file(cfg.string(), R"({"seed": 9, "steps": 60, "faults": [{"at_step": 30, "robot": 1}]})");
  const std::string cli = RIGCOV_CLI_PATH;
  auto invoke = [&](const std::string& out, const std::string& threads) {
    const std::string cmd = "RIGID_COVERAGE_THREADS=" + threads + " \"" + cli + "\" simulate --config \"" +
                            cfg.string() + "\" --out \"" + (dir / out).string() + "\" 2>/dev/null";
    return std::system(cmd.c_str());
  };
  if (invoke("a", "0") != 0 || invoke("b", "0") != 0 || invoke("c", "4") != 0) {
    return {false, "simulate exited with an error"};
  }
  int compared = 0, differing = 0;
  for (const char* name : {"trajectories.csv", "cost.csv", "events.json", "summary.json", "plot.gp"}) {
    const std::string a = read_text_file((dir / "a" / name).string());
    for (const char* other : {"b", "c"}) {
      ++compared;
      if (read_text_file((dir / other / name).string()) != a) ++differing;
    }
  }
  fs::remove_all(dir);
  return {differing == 0, std::to_string(compared - differing) + "/" + std::to_string(compared) +
                              " file pairs identical (serial, serial, 4 threads)"};
#endif
}

}  // namespace

int main() {
  report(1, "Laman-Henneberg equivalence", laman_equivalence);
  report(2, "generic bearing rigidity rank", generic_rank);
  report(3, "rigidity matrix vs finite differences", jacobian_fd);
  report(4, "recovery soundness", recovery_soundness);
  report(5, "scaled Lyapunov equation", lyapunov);
  report(6, "terminal set invariance", terminal_invariance);
  report(7, "feasible reference tracking", feasible_tracking);
  report(8, "infeasible reference goes to offset optimum", infeasible_tracking);
  report(9, "mu sweep: H monotone, bearing error ordered", mu_sweep);
  report(10, "fault recovery end to end", fault_resilience);
  report(11, "deterministic traces", determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
