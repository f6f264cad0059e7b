#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "rigcov/bearing.h"
#include "rigcov/config.h"
#include "rigcov/coverage.h"
#include "rigcov/error.h"
#include "rigcov/graph.h"
#include "rigcov/recovery.h"
#include "rigcov/sim.h"
#include "rigcov/terminal.h"

namespace py = pybind11;
using namespace rigcov;

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

EdgeList to_pairs(const std::vector<Edge>& edges) {
  EdgeList out;
  for (const Edge& e : edges) out.emplace_back(e.i, e.j);
  return out;
}

Framework make_framework(int n, const EdgeList& edges, const Eigen::MatrixXd& positions) {
  if (positions.rows() != n) throw Error(ErrorKind::kInvalidInput, "positions must have one row per vertex");
  std::vector<Eigen::VectorXd> pts;
  for (Eigen::Index r = 0; r < positions.rows(); ++r) pts.push_back(positions.row(r).transpose());
  return Framework(Graph(n, edges), Configuration(static_cast<int>(positions.cols()), pts));
}

std::vector<Point> to_points(const Eigen::MatrixXd& m) {
  if (m.cols() != 2) throw Error(ErrorKind::kInvalidInput, "positions must be n x 2");
  std::vector<Point> out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.emplace_back(m(r, 0), m(r, 1));
  return out;
}

Eigen::MatrixXd from_points(const std::vector<Point>& pts) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t r = 0; r < pts.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = pts[r].transpose();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "rigid coverage control core";

  py::register_exception<Error>(m, "Error");

  m.def(
      "laman_check",
      [](int n, const EdgeList& edges) {
        const LamanVerdict v = laman_check(Graph(n, edges));
        py::dict d;
        d["is_laman"] = v.is_laman;
        d["count_ok"] = v.count_ok;
        d["violating_subset"] = v.violating_subset ? py::cast(*v.violating_subset) : py::none();
        return d;
      },
      py::arg("n"), py::arg("edges"));

  m.def(
      "henneberg_generate",
      [](int n, std::uint64_t seed, double split_probability) {
        return to_pairs(henneberg_generate(n, seed, split_probability).graph.edge_list());
      },
      py::arg("n"), py::arg("seed"), py::arg("split_probability") = 0.5,
      "Edges of a random Laman graph on n vertices.");

  m.def(
      "rigidity_matrix",
      [](int n, const EdgeList& edges, const Eigen::MatrixXd& positions) {
        return rigidity_matrix(make_framework(n, edges, positions));
      },
      py::arg("n"), py::arg("edges"), py::arg("positions"));

  m.def(
      "rigidity_rank",
      [](int n, const EdgeList& edges, const Eigen::MatrixXd& positions, double tol) {
        const RigidityRank rr = rigidity_rank(make_framework(n, edges, positions), tol);
        py::dict d;
        d["rank"] = rr.rank;
        d["bound"] = rr.bound;
        d["singular_values"] = rr.singular_values;
        return d;
      },
      py::arg("n"), py::arg("edges"), py::arg("positions"), py::arg("tol") = kDefaultRankTolerance);

  m.def(
      "closing_ranks",
      [](int n, const EdgeList& edges, int lost) {
        const ClosingRanks cr = closing_ranks(Graph(n, edges), lost);
        py::dict d;
        d["new_edges"] = to_pairs(cr.new_edges);
        d["contraction_vertex"] = cr.contraction_vertex ? py::cast(*cr.contraction_vertex) : py::none();
        return d;
      },
      py::arg("n"), py::arg("edges"), py::arg("lost"));

  m.def(
      "coverage_cost",
      [](const Eigen::MatrixXd& positions) {
        return coverage_cost(to_points(positions), ConvexRegion::unit_square(), DensityField{});
      },
      py::arg("positions"), "Locational cost on the unit square with uniform density.");

  m.def(
      "lloyd_step",
      [](const Eigen::MatrixXd& positions) {
        return from_points(lloyd_step(to_points(positions), ConvexRegion::unit_square(), DensityField{}));
      },
      py::arg("positions"));

  m.def("lqr_gain", &lqr_gain, py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("R"));
  m.def("lyapunov_P", &lyapunov_P, py::arg("A_K"), py::arg("Q_star"), py::arg("c"));

  m.def(
      "validate_config",
      [](const std::string& json_text) { validate_config(parse_config(json_text)); },
      py::arg("json_text"));

  m.def(
      "simulate",
      [](const std::string& json_text, std::optional<std::uint64_t> seed, int threads) {
        const SimConfig cfg = parse_config(json_text, seed);
        SimTrace trace;
        {
          py::gil_scoped_release release;
          trace = run(cfg, RunOptions{threads});
        }
        return py::module_::import("json").attr("loads")(summary_json(trace));
      },
      py::arg("config_json"), py::arg("seed") = py::none(), py::arg("threads") = 0,
      "Runs the coverage loop and returns the summary as a dict.");
}
