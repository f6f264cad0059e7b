#include "rigcov/sim.h"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "rigcov/bearing.h"
#include "rigcov/coverage.h"
#include "rigcov/error.h"
#include "rigcov/io.h"
#include "rigcov/mpc.h"
#include "rigcov/recovery.h"
#include "rigcov/terminal.h"

namespace rigcov {

using nlohmann::json;

int threads_from_env() {
  const char* env = std::getenv("RIGID_COVERAGE_THREADS");
  if (!env || !*env) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) return 0;
  return static_cast<int>(v);
}

namespace {

using ModelKey = std::tuple<std::string, double, double, double, double>;

ModelKey key_of(const ModelConfig& m) { return {m.type, m.h, m.u_max, m.v_max, m.kappa}; }

struct Robot {
  int id;
  ModelPtr model;
  std::shared_ptr<const TerminalSet> terminal;
  Eigen::VectorXd x;
  std::optional<OcpSolution> warm;
};

class Simulation {
 public:
  Simulation(const SimConfig& config, int threads)
      : cfg_(config),
        setpoints_(config.epsilon > 0.0 ? config.region.shrunk(config.epsilon) : config.region),
        graph_(config.graph),
        threads_(threads) {
    std::map<ModelKey, std::shared_ptr<const TerminalSet>> terminals;
    for (std::size_t i = 0; i < config.robots.size(); ++i) {
      const RobotInit& init = config.robots[i];
      Robot r{static_cast<int>(i), init.model.build(), nullptr, Eigen::VectorXd(), std::nullopt};
      auto& ts = terminals[key_of(init.model)];
      if (!ts) {
        ts = std::make_shared<const TerminalSet>(design_terminal_set(
            *r.model, config.mpc.Q, config.mpc.R, Eigen::Vector2d::Zero(), config.terminal));
      }
      r.terminal = ts;
      r.x = Eigen::VectorXd::Zero(r.model->state_dim());
      r.x.head(2) = init.position;
      r.x.segment(2, 2) = init.velocity;
      robots_.push_back(std::move(r));
    }
    for (const FaultEvent& f : config.faults) faults_[f.at_step] = f.robot;
    rebuild_plan();
  }

  SimTrace run() {
    SimTrace trace;
    trace.seed = cfg_.seed;
    trace.initial_robots = static_cast<int>(robots_.size());
    for (int k = 0; k < cfg_.steps; ++k) {
      bool updated = false;
      if (auto f = faults_.find(k); f != faults_.end()) {
        trace.events.push_back(handle_fault(k, f->second));
        update_partition();
        updated = true;
      } else if (k == 0 || partition_update_due(positions(), refs_, errors_)) {
        update_partition();
        updated = true;
      }
      if (updated) ++trace.partition_updates;
      trace.steps.push_back(step(k, updated));
    }
    for (const Robot& r : robots_) trace.final_states.emplace_back(r.id, r.x);
    return trace;
  }

 private:
  std::vector<Point> positions() const {
    std::vector<Point> out;
    for (const Robot& r : robots_) out.push_back(r.x.head<2>());
    return out;
  }

  void rebuild_plan() {
    plan_ = RecoveryPlan{};
    if (graph_.num_vertices() >= 3) plan_ = build_recovery_plan(graph_);
  }

  void update_partition() {
    const std::vector<Point> p = positions();
    refs_ = centroids(voronoi_partition(p, cfg_.region, false), cfg_.density, cfg_.quadrature);
    errors_ = tracking_errors(p, refs_);
    desired_.clear();
    for (const Edge& e : graph_.edges()) desired_.push_back((refs_[e.j] - refs_[e.i]).normalized());
  }

  FaultRecord handle_fault(int k, int robot_id) {
    const auto it = std::find_if(robots_.begin(), robots_.end(),
                                 [robot_id](const Robot& r) { return r.id == robot_id; });
    if (it == robots_.end()) throw Error(ErrorKind::kConfig, "fault names a robot that is gone");
    const int lost = static_cast<int>(it - robots_.begin());
    FaultRecord rec;
    rec.k = k;
    rec.robot = robot_id;
    auto id_of = [this](int idx) { return robots_[idx].id; };

    Graph next;
    if (graph_.num_vertices() >= 3) {
      const std::vector<int> nbrs = graph_.neighbors(lost);
      const auto entry = plan_.entries.find({nbrs.front(), lost});
      if (entry == plan_.entries.end()) {
        throw Error(ErrorKind::kRecoveryInfeasible, "no plan entry for robot " + std::to_string(robot_id));
      }
      if (entry->second.contraction_vertex) rec.contraction_vertex = id_of(*entry->second.contraction_vertex);
      for (const Edge& e : entry->second.new_edges) rec.new_edges.emplace_back(id_of(e.i), id_of(e.j));
      next = apply_repair(graph_, lost, entry->second.new_edges);
    } else {
      next = remove_vertex(graph_, lost);
    }
    robots_.erase(it);
    graph_ = next;
    rebuild_plan();

    rec.edges_after = graph_.num_edges();
    const int n = graph_.num_vertices();
    if (n >= 2) {
      rec.laman_after = laman_check(graph_).is_laman;
      std::vector<Eigen::VectorXd> pts;
      for (const Point& p : positions()) pts.push_back(p);
      try {
        const RigidityRank rr = rigidity_rank(Framework(graph_, Configuration(2, pts)));
        rec.rank_after = rr.rank;
        rec.rank_bound_after = rr.bound;
        rec.ibr_after = rr.rank == rr.bound;
      } catch (const Error&) {
        rec.ibr_after = false;
      }
    }
    return rec;
  }

  OcpProblem problem_for(int i) const {
    const Robot& r = robots_[i];
    OcpProblem p;
    p.model = r.model;
    p.horizon = cfg_.mpc.horizon;
    p.weights = CostWeights{cfg_.mpc.Q, cfg_.mpc.R, cfg_.mpc.S_r, cfg_.mpc.w_b, cfg_.mpc.mu};
    p.terminal = *r.terminal;
    p.x0 = r.x;
    p.r_ref = refs_[i];
    for (int j : graph_.neighbors(i)) {
      NeighborBearing nb;
      nb.neighbor = robots_[j].id;
      nb.desired = (refs_[i] - refs_[j]).normalized();
      nb.anchor = refs_[j];
      p.bearings.push_back(nb);
    }
    p.feasible_setpoints = setpoints_;
    p.solver = cfg_.mpc.solver;
    return p;
  }

  struct SolveSlot {
    Eigen::VectorXd u;
    OcpSolution sol;
    OcpSolution next_warm;
    Eigen::VectorXd x_next;
    std::exception_ptr error;
  };

  void solve_one(int i, SolveSlot& slot) const {
    try {
      const Robot& r = robots_[i];
      const OcpProblem p = problem_for(i);
      auto [u, sol] = mpc_step(p, r.warm);
      slot.x_next = r.model->step(r.x, u);
      slot.next_warm = shift_warm_start(p, sol, slot.x_next);
      slot.u = std::move(u);
      slot.sol = std::move(sol);
    } catch (...) {
      slot.error = std::current_exception();
    }
  }

  StepRecord step(int k, bool updated) {
    StepRecord rec;
    rec.k = k;
    rec.partition_updated = updated;
    const std::vector<Point> p = positions();
    rec.coverage_cost = coverage_cost(p, voronoi_partition(p, cfg_.region, false), cfg_.density,
                                      cfg_.quadrature);
    std::size_t e_idx = 0;
    for (const Edge& e : graph_.edges()) {
      rec.edges.emplace_back(robots_[e.i].id, robots_[e.j].id);
      rec.desired_bearings.push_back(desired_[e_idx]);
      const Eigen::Vector2d d = p[e.j] - p[e.i];
      if (d.norm() > kSeparationTolerance) {
        rec.bearing_error += (d.normalized() - desired_[e_idx]).squaredNorm();
      }
      ++e_idx;
    }
    const int n = static_cast<int>(robots_.size());
    if (n >= 2) {
      std::vector<Eigen::VectorXd> pts(p.begin(), p.end());
      try {
        const RigidityRank rr = rigidity_rank(Framework(graph_, Configuration(2, pts)));
        rec.rigidity_rank = rr.rank;
        rec.rank_bound = rr.bound;
      } catch (const Error&) {
        rec.rigidity_rank = -1;
        rec.rank_bound = 2 * n - 3;
      }
    }

    std::vector<SolveSlot> slots(n);
    const int workers = std::min(threads_, n);
    if (workers <= 1) {
      for (int i = 0; i < n; ++i) solve_one(i, slots[i]);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([this, t, workers, n, &slots] {
          for (int i = t; i < n; i += workers) solve_one(i, slots[i]);
        });
      }
      for (std::thread& th : pool) th.join();
    }
    for (const SolveSlot& s : slots) {
      if (s.error) std::rethrow_exception(s.error);
    }

    for (int i = 0; i < n; ++i) {
      Robot& r = robots_[i];
      SolveSlot& s = slots[i];
      RobotRecord rr;
      rr.id = r.id;
      rr.state = r.x;
      rr.input = s.u;
      rr.reference = refs_[i];
      rr.rbar = s.sol.rbar;
      rr.stored_error = errors_.e[i];
      rr.cost = s.sol.cost;
      const Eigen::VectorXd ex = r.x - s.sol.xbar;
      const Eigen::VectorXd eu = s.u - s.sol.ubar;
      rr.stage_cost = ex.dot(cfg_.mpc.Q * ex) + eu.dot(cfg_.mpc.R * eu);
      rr.iterations = s.sol.iterations;
      rr.kkt_residual = s.sol.kkt_residual;
      rec.robots.push_back(std::move(rr));
      r.x = s.x_next;
      r.warm = std::move(s.next_warm);
    }
    return rec;
  }

  const SimConfig& cfg_;
  ConvexRegion setpoints_;
  Graph graph_;
  int threads_;
  std::vector<Robot> robots_;
  std::map<int, int> faults_;
  RecoveryPlan plan_;
  std::vector<Point> refs_;
  TrackingErrors errors_;
  std::vector<Eigen::Vector2d> desired_;
};

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

json point(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(num(v(k)));
  return a;
}

}  // namespace

SimTrace run(const SimConfig& config, const RunOptions& options) {
  validate_config(config);
  const int threads = options.threads < 0 ? threads_from_env() : options.threads;
  Simulation sim(config, threads);
  return sim.run();
}

std::string trajectories_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "k,robot,x,y,vx,vy,ux,uy,ref_x,ref_y,rbar_x,rbar_y,stored_error,J,stage,iterations,kkt\n";
  for (const StepRecord& s : trace.steps) {
    for (const RobotRecord& r : s.robots) {
      out << s.k << ',' << r.id;
      for (Eigen::Index c = 0; c < r.state.size(); ++c) out << ',' << format_number(r.state(c));
      for (Eigen::Index c = 0; c < r.input.size(); ++c) out << ',' << format_number(r.input(c));
      out << ',' << format_number(r.reference.x()) << ',' << format_number(r.reference.y()) << ','
          << format_number(r.rbar.x()) << ',' << format_number(r.rbar.y()) << ','
          << format_number(r.stored_error) << ',' << format_number(r.cost) << ','
          << format_number(r.stage_cost) << ',' << r.iterations << ','
          << format_number(r.kkt_residual) << '\n';
    }
  }
  return out.str();
}

std::string cost_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "k,H,bearing_error,rank,rank_bound,partition_updated,robots";
  for (int id = 0; id < trace.initial_robots; ++id) out << ",J_" << id;
  out << '\n';
  for (const StepRecord& s : trace.steps) {
    out << s.k << ',' << format_number(s.coverage_cost) << ',' << format_number(s.bearing_error)
        << ',' << s.rigidity_rank << ',' << s.rank_bound << ',' << (s.partition_updated ? 1 : 0)
        << ',' << s.robots.size();
    std::vector<double> j(trace.initial_robots, std::nan(""));
    for (const RobotRecord& r : s.robots) j[r.id] = r.cost;
    for (double v : j) out << ',' << format_number(v);
    out << '\n';
  }
  return out.str();
}

std::string events_json(const SimTrace& trace) {
  json faults = json::array();
  for (const FaultRecord& f : trace.events) {
    json e;
    e["k"] = f.k;
    e["robot"] = f.robot;
    e["contraction_vertex"] = f.contraction_vertex ? json(*f.contraction_vertex) : json(nullptr);
    json edges = json::array();
    for (const auto& [a, b] : f.new_edges) edges.push_back({a, b});
    e["recovery_edges"] = edges;
    e["edges_after"] = f.edges_after;
    e["laman_after"] = f.laman_after;
    e["ibr_after"] = f.ibr_after;
    e["rank_after"] = f.rank_after;
    e["rank_bound_after"] = f.rank_bound_after;
    faults.push_back(e);
  }
  return json{{"faults", faults}}.dump(2) + "\n";
}

std::string summary_json(const SimTrace& trace) {
  json j;
  j["seed"] = trace.seed;
  j["steps"] = trace.steps.size();
  j["robots_initial"] = trace.initial_robots;
  j["robots_final"] = trace.final_states.size();
  j["partition_updates"] = trace.partition_updates;
  j["faults"] = trace.events.size();
  if (!trace.steps.empty()) {
    const StepRecord& last = trace.steps.back();
    j["final_coverage_cost"] = num(last.coverage_cost);
    j["final_bearing_error"] = num(last.bearing_error);
    j["final_rigidity_rank"] = last.rigidity_rank;
    long total_iterations = 0;
    int max_iterations = 0;
    for (const StepRecord& s : trace.steps) {
      for (const RobotRecord& r : s.robots) {
        total_iterations += r.iterations;
        max_iterations = std::max(max_iterations, r.iterations);
      }
    }
    j["solver_iterations_total"] = total_iterations;
    j["solver_iterations_max"] = max_iterations;
    json robots = json::array();
    for (const auto& [id, x] : trace.final_states) {
      json r;
      r["robot"] = id;
      r["position"] = point(x.head(2));
      for (const RobotRecord& rr : last.robots) {
        if (rr.id != id) continue;
        r["reference"] = point(rr.reference);
        r["error"] = num((x.head<2>() - rr.reference).norm());
      }
      robots.push_back(r);
    }
    j["final"] = robots;
  }
  return j.dump(2) + "\n";
}

std::string plot_script() {
  return "set datafile separator ','\n"
         "set terminal pngcairo size 800,500\n"
         "set output 'coverage_cost.png'\n"
         "set xlabel 'time step k'\n"
         "set ylabel 'coverage cost H'\n"
         "set grid\n"
         "plot 'cost.csv' using 1:2 every ::1 with lines lw 2 title 'H'\n";
}

void export_trace(const SimTrace& trace, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "trajectories.csv").string(), trajectories_csv(trace));
  write_text_file((dir / "cost.csv").string(), cost_csv(trace));
  write_text_file((dir / "events.json").string(), events_json(trace));
  write_text_file((dir / "summary.json").string(), summary_json(trace));
  write_text_file((dir / "plot.gp").string(), plot_script());
}

}  // namespace rigcov
