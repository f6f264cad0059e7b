#include "rigcov/bearing.h"

#include <algorithm>
#include <string>

#include <Eigen/SVD>

#include "rigcov/error.h"

namespace rigcov {

Configuration::Configuration(int dim, Eigen::VectorXd stacked)
    : dim_(dim), stacked_(std::move(stacked)) {
  if (dim_ != 2 && dim_ != 3) {
    throw Error(ErrorKind::kInvalidInput, "dimension must be 2 or 3");
  }
  if (stacked_.size() % dim_ != 0) {
    throw Error(ErrorKind::kInvalidInput, "stacked configuration length not a multiple of d");
  }
  if (stacked_.size() / dim_ < 2) {
    throw Error(ErrorKind::kInvalidInput, "configuration needs at least two points");
  }
  if (!stacked_.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "configuration has non-finite coordinates");
  }
}

namespace {

Eigen::VectorXd stack(int dim, const std::vector<Eigen::VectorXd>& points) {
  Eigen::VectorXd out(dim * static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw Error(ErrorKind::kInvalidInput, "point dimension mismatch");
    }
    out.segment(dim * i, dim) = points[i];
  }
  return out;
}

}  // namespace

Configuration::Configuration(int dim, const std::vector<Eigen::VectorXd>& points)
    : Configuration(dim, stack(dim, points)) {}

Framework::Framework(Graph graph, Configuration config)
    : graph_(std::move(graph)), config_(std::move(config)) {
  if (graph_.num_vertices() != config_.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "graph has " + std::to_string(graph_.num_vertices()) +
                    " vertices but configuration has " + std::to_string(config_.size()));
  }
  for (const Edge& e : graph_.edges()) {
    if ((config_.point(e.j) - config_.point(e.i)).norm() < kSeparationTolerance) {
      throw Error(ErrorKind::kDegenerateEdge,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                      ") has coincident endpoints");
    }
  }
}

Eigen::VectorXd BearingVector::stacked() const {
  if (bearings.empty()) return {};
  const Eigen::Index d = bearings.front().size();
  Eigen::VectorXd out(d * static_cast<Eigen::Index>(bearings.size()));
  for (std::size_t k = 0; k < bearings.size(); ++k) out.segment(d * k, d) = bearings[k];
  return out;
}

Eigen::VectorXd bearing(const Eigen::VectorXd& p_from, const Eigen::VectorXd& p_to) {
  const Eigen::VectorXd e = p_to - p_from;
  const double len = e.norm();
  if (len < kSeparationTolerance) {
    throw Error(ErrorKind::kDegenerateEdge, "coincident endpoints");
  }
  return e / len;
}

Eigen::MatrixXd orthogonal_projector(const Eigen::VectorXd& g) {
  return Eigen::MatrixXd::Identity(g.size(), g.size()) - g * g.transpose();
}

BearingVector bearing_function(const Framework& fw) {
  BearingVector out;
  out.edge_order = fw.graph().edge_list();
  out.bearings.reserve(out.edge_order.size());
  for (const Edge& e : out.edge_order) {
    out.bearings.push_back(bearing(fw.config().point(e.i), fw.config().point(e.j)));
  }
  return out;
}

Eigen::MatrixXd rigidity_matrix(const Framework& fw) {
  const int d = fw.dim();
  const auto edges = fw.graph().edge_list();
  Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(d * edges.size(), d * fw.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const Eigen::VectorXd diff = fw.config().point(e.j) - fw.config().point(e.i);
    const double len = diff.norm();
    const Eigen::MatrixXd block = orthogonal_projector(diff / len) / len;
    rb.block(d * k, d * e.i, d, d) = -block;
    rb.block(d * k, d * e.j, d, d) = block;
  }
  return rb;
}

RigidityRank rigidity_rank(const Framework& fw, double tol) {
  RigidityRank out;
  const int d = fw.dim();
  out.bound = d * fw.size() - d - 1;
  const Eigen::MatrixXd rb = rigidity_matrix(fw);
  if (rb.rows() == 0) {
    out.singular_values.clear();
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rb);
  const Eigen::VectorXd& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > tol * sigma_max) ++out.rank;
  }
  out.within_bound = out.rank <= out.bound;
  if (out.bound >= 1 && out.bound <= sv.size()) {
    out.smallest_nontrivial = sv(out.bound - 1);
  }
  return out;
}

bool is_infinitesimally_bearing_rigid(const Framework& fw, double tol) {
  const RigidityRank r = rigidity_rank(fw, tol);
  return r.rank == r.bound;
}

Eigen::MatrixXd trivial_motions(const Configuration& config) {
  const int d = config.dim();
  const int n = config.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d * n, d + 1);
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) centroid += config.point(i);
  centroid /= n;
  for (int i = 0; i < n; ++i) {
    out.block(d * i, 0, d, d).setIdentity();
    out.block(d * i, d, d, 1) = config.point(i) - centroid;
  }
  return out;
}

}  // namespace rigcov
