#pragma once

#include <vector>

#include <Eigen/Core>

#include "rigcov/graph.h"

namespace rigcov {

inline constexpr double kSeparationTolerance = 1e-9;
inline constexpr double kDefaultRankTolerance = 1e-8;

/// Stacked positions p = [p_1; ...; p_n] in R^(d n).
class Configuration {
 public:
  Configuration(int dim, Eigen::VectorXd stacked);
  Configuration(int dim, const std::vector<Eigen::VectorXd>& points);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(stacked_.size()) / dim_; }
  const Eigen::VectorXd& stacked() const { return stacked_; }
  Eigen::VectorXd point(int i) const { return stacked_.segment(dim_ * i, dim_); }

 private:
  int dim_;
  Eigen::VectorXd stacked_;
};

class Framework {
 public:
  /// Throws invalid-input on size mismatch and degenerate-edge when an edge
  /// has (numerically) coincident endpoints.
  Framework(Graph graph, Configuration config);

  const Graph& graph() const { return graph_; }
  const Configuration& config() const { return config_; }
  int dim() const { return config_.dim(); }
  int size() const { return config_.size(); }

 private:
  Graph graph_;
  Configuration config_;
};

/// Unit bearings g_ij = (p_j - p_i) / |p_j - p_i| in canonical edge order
/// (i < j).
struct BearingVector {
  std::vector<Edge> edge_order;
  std::vector<Eigen::VectorXd> bearings;

  Eigen::VectorXd stacked() const;
};

BearingVector bearing_function(const Framework& fw);

/// Bearing of p_to seen from p_from. Throws degenerate-edge on coincidence.
Eigen::VectorXd bearing(const Eigen::VectorXd& p_from, const Eigen::VectorXd& p_to);

/// Orthogonal projector I - g g^T onto the complement of g.
Eigen::MatrixXd orthogonal_projector(const Eigen::VectorXd& g);

/// Jacobian of the stacked bearing function, (d m) x (d n).
Eigen::MatrixXd rigidity_matrix(const Framework& fw);

struct RigidityRank {
  int rank = 0;
  /// Upper bound d n - d - 1 on the rank.
  int bound = 0;
  /// False would mean the computed rank exceeds the bound, which can only
  /// come from numerical breakdown.
  bool within_bound = true;
  /// Descending.
  std::vector<double> singular_values;
  /// The bound-th largest singular value, zero if it does not exist.
  double smallest_nontrivial = 0.0;
};

RigidityRank rigidity_rank(const Framework& fw, double tol = kDefaultRankTolerance);

bool is_infinitesimally_bearing_rigid(const Framework& fw,
                                      double tol = kDefaultRankTolerance);

/// Columns span the trivial bearing motions: d translations and the centred
/// scaling direction.
Eigen::MatrixXd trivial_motions(const Configuration& config);

}  // namespace rigcov
