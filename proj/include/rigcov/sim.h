#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rigcov/config.h"
#include "rigcov/graph.h"

namespace rigcov {

struct RobotRecord {
  /// Original robot id.
  int id = 0;
  Eigen::VectorXd state;
  Eigen::VectorXd input;
  Eigen::Vector2d reference = Eigen::Vector2d::Zero();
  Eigen::Vector2d rbar = Eigen::Vector2d::Zero();
  /// Error stored at the last partition update.
  double stored_error = 0.0;
  /// Optimal cost J* and the stage cost of the applied input.
  double cost = 0.0;
  double stage_cost = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct StepRecord {
  int k = 0;
  std::vector<RobotRecord> robots;
  /// Current edges in original ids with the desired bearing g_ij = r_j - r_i
  /// (normalised) from the last partition update.
  std::vector<std::pair<int, int>> edges;
  std::vector<Eigen::Vector2d> desired_bearings;
  double coverage_cost = 0.0;
  /// sum over edges of |g_ij(p) - g_ij desired|^2.
  double bearing_error = 0.0;
  int rigidity_rank = 0;
  int rank_bound = 0;
  bool partition_updated = false;
};

struct FaultRecord {
  int k = 0;
  int robot = 0;
  std::optional<int> contraction_vertex;
  std::vector<std::pair<int, int>> new_edges;
  int edges_after = 0;
  bool laman_after = false;
  bool ibr_after = false;
  int rank_after = 0;
  int rank_bound_after = 0;
};

struct SimTrace {
  std::uint64_t seed = 0;
  int initial_robots = 0;
  std::vector<StepRecord> steps;
  std::vector<FaultRecord> events;
  /// States after the last step, with their original ids.
  std::vector<std::pair<int, Eigen::VectorXd>> final_states;
  int partition_updates = 0;
};

/// RIGID_COVERAGE_THREADS, or the hardware concurrency when unset. 0 and 1
/// both mean serial.
int threads_from_env();

struct RunOptions {
  /// Negative means threads_from_env().
  int threads = -1;
};

/// Coverage loop with fault injection and recovery. Throws config on invalid
/// input, recovery-infeasible, infeasible or recursive-feasibility-violation.
SimTrace run(const SimConfig& config, const RunOptions& options = {});

std::string trajectories_csv(const SimTrace& trace);
std::string cost_csv(const SimTrace& trace);
std::string events_json(const SimTrace& trace);
std::string summary_json(const SimTrace& trace);
std::string plot_script();

/// Writes trajectories.csv, cost.csv, events.json, summary.json and plot.gp.
void export_trace(const SimTrace& trace, const std::string& out_dir);

}  // namespace rigcov
