#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rigcov/density.h"
#include "rigcov/dynamics.h"
#include "rigcov/geometry.h"
#include "rigcov/graph.h"
#include "rigcov/interior_point.h"
#include "rigcov/terminal.h"

namespace rigcov {

struct ModelConfig {
  /// "double_integrator" or "drag".
  std::string type = "double_integrator";
  double h = 0.1;
  double u_max = 2.0;
  double v_max = 1.0;
  double kappa = 0.5;

  ModelPtr build() const;
};

struct RobotInit {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  ModelConfig model;
};

struct FaultEvent {
  int at_step = 0;
  /// Original robot id (index in the initial robot list).
  int robot = 0;
};

struct MpcConfig {
  int horizon = 10;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::MatrixXd S_r;
  double w_b = 1.0;
  double mu = 0.7;
  InteriorPointOptions solver;
};

struct SimConfig {
  std::uint64_t seed = 1;
  int steps = 200;
  ConvexRegion region = ConvexRegion::unit_square();
  DensityField density;
  std::vector<RobotInit> robots;
  Graph graph;
  MpcConfig mpc;
  TerminalOptions terminal;
  QuadratureOptions quadrature;
  /// Inward margin of the admissible setpoint region.
  double epsilon = 0.01;
  std::vector<FaultEvent> faults;
};

/// Six random robots on the unit square with a one-bump Gaussian density and
/// a generated Laman graph.
SimConfig default_config(std::uint64_t seed = 1);

/// Fields missing from the JSON keep their default_config values. A seed
/// override replaces the top-level seed before anything random is drawn.
/// Throws config on malformed input.
SimConfig parse_config(const std::string& json_text,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Throws io when the file cannot be read.
SimConfig load_config(const std::string& path,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

/// Checks the run invariants: positions inside the region and pairwise
/// distinct, the graph sized to the robots and Laman (the violating subset is
/// named), faults in range and leaving at least two robots. Throws config.
void validate_config(const SimConfig& config);

/// Uniform positions in the region shrunk by `margin`, at least
/// `min_separation` apart.
std::vector<Eigen::Vector2d> random_positions(int n, const ConvexRegion& region, double margin,
                                              double min_separation, std::uint64_t seed);

}  // namespace rigcov
