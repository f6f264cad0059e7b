#include "rigcov/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rigcov/error.h"
#include "rigcov/rng.h"

namespace rigcov {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::kConfig, msg); }

double number(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<int>();
}

Eigen::Vector2d vec2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) fail(what + " must be a pair of numbers");
  return {number(j[0], what), number(j[1], what)};
}

// Scalar (times identity), diagonal list or full nested matrix.
Eigen::MatrixXd matrix(const json& j, int n, const std::string& what) {
  if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(n, n);
  if (!j.is_array() || static_cast<int>(j.size()) != n) fail(what + " must have " + std::to_string(n) + " entries");
  if (j[0].is_number()) {
    Eigen::VectorXd d(n);
    for (int k = 0; k < n; ++k) d(k) = number(j[k], what);
    return d.asDiagonal();
  }
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) fail(what + " rows must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) m(r, c) = number(j[r][c], what);
  }
  return m;
}

ModelConfig parse_model(const json& j, ModelConfig m) {
  if (!j.is_object()) fail("model must be an object");
  if (j.contains("type")) m.type = j["type"].get<std::string>();
  if (m.type != "double_integrator" && m.type != "drag") fail("unknown model type '" + m.type + "'");
  if (j.contains("h")) m.h = number(j["h"], "model.h");
  if (j.contains("u_max")) m.u_max = number(j["u_max"], "model.u_max");
  if (j.contains("v_max")) m.v_max = number(j["v_max"], "model.v_max");
  if (j.contains("kappa")) m.kappa = number(j["kappa"], "model.kappa");
  return m;
}

DensityField parse_density(const json& j, const ConvexRegion& region) {
  const std::string type = j.value("type", "uniform");
  if (type == "uniform") return DensityField(UniformDensity{j.value("value", 1.0)});
  if (type == "gaussian_mixture") {
    GaussianMixture g;
    g.baseline = j.value("baseline", 0.0);
    for (const json& c : j.value("components", json::array())) {
      GaussianComponent comp;
      comp.mean = vec2(c.at("mean"), "density component mean");
      if (c.contains("covariance_diag")) comp.covariance_diag = vec2(c["covariance_diag"], "covariance_diag");
      comp.weight = c.value("weight", 1.0);
      g.components.push_back(comp);
    }
    return DensityField(g);
  }
  if (type == "grid") {
    GridDensity grid;
    if (!j.contains("resolution") || !j.contains("values")) fail("grid density needs resolution and values");
    const json& res = j["resolution"];
    if (!res.is_array() || res.size() != 2) fail("grid resolution must be [nx, ny]");
    grid.nx = integer(res[0], "grid resolution");
    grid.ny = integer(res[1], "grid resolution");
    Point lo = region.vertices().front(), hi = lo;
    for (const Point& p : region.vertices()) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    grid.lower = j.contains("lower") ? vec2(j["lower"], "grid lower") : lo;
    grid.upper = j.contains("upper") ? vec2(j["upper"], "grid upper") : hi;
    for (const json& v : j["values"]) {
      if (v.is_array()) {
        for (const json& x : v) grid.values.push_back(number(x, "grid value"));
      } else {
        grid.values.push_back(number(v, "grid value"));
      }
    }
    return DensityField(grid);
  }
  fail("unknown density type '" + type + "'");
}

Graph parse_graph(const json& j, int n_robots, std::uint64_t seed) {
  if (j.contains("generate")) {
    const json& g = j["generate"];
    const int n = g.contains("n") ? integer(g["n"], "graph.generate.n") : n_robots;
    const std::uint64_t gseed = g.contains("seed") ? g["seed"].get<std::uint64_t>() : seed;
    const double split = g.value("split_prob", 0.5);
    return henneberg_generate(n, gseed, split).graph;
  }
  const int n = j.contains("n") ? integer(j["n"], "graph.n") : n_robots;
  Graph graph(n);
  for (const json& e : j.value("edges", json::array())) {
    if (!e.is_array() || e.size() != 2) fail("graph edges must be pairs");
    graph.add_edge(integer(e[0], "edge endpoint"), integer(e[1], "edge endpoint"));
  }
  return graph;
}

Eigen::MatrixXd diag(std::initializer_list<double> values) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) d(k++) = v;
  return d.asDiagonal();
}

}  // namespace

ModelPtr ModelConfig::build() const {
  if (type == "double_integrator") {
    return std::make_shared<DoubleIntegrator>(DoubleIntegratorParams{2, h, u_max, v_max});
  }
  if (type == "drag") return std::make_shared<DragDoubleIntegrator>(DragParams{2, h, u_max, v_max, kappa});
  throw Error(ErrorKind::kConfig, "unknown model type '" + type + "'");
}

std::vector<Eigen::Vector2d> random_positions(int n, const ConvexRegion& region, double margin,
                                              double min_separation, std::uint64_t seed) {
  const ConvexRegion inner = region.shrunk(margin);
  Point lo = inner.vertices().front(), hi = lo;
  for (const Point& p : inner.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Rng rng(seed);
  std::vector<Eigen::Vector2d> out;
  for (int attempt = 0; static_cast<int>(out.size()) < n; ++attempt) {
    if (attempt > 100000) fail("could not place " + std::to_string(n) + " separated robots");
    const Point q(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
    if (!inner.contains(q, 0.0)) continue;
    bool far = true;
    for (const Point& p : out) far = far && (p - q).norm() >= min_separation;
    if (far) out.push_back(q);
  }
  return out;
}

SimConfig default_config(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  GaussianMixture g;
  g.components.push_back({Point(0.7, 0.7), Point(0.04, 0.04), 1.0});
  g.baseline = 0.1;
  c.density = DensityField(g);
  c.mpc.Q = diag({0.1, 0.1, 0.01, 0.01});
  c.mpc.R = diag({1e-3, 1e-3});
  c.mpc.S_r = diag({1.0, 1.0});
  for (const auto& p : random_positions(6, c.region, c.epsilon, 0.05, seed)) {
    c.robots.push_back({p, Eigen::Vector2d::Zero(), ModelConfig{}});
  }
  c.graph = henneberg_generate(6, seed, 0.5).graph;
  return c;
}

SimConfig parse_config(const std::string& json_text, std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  try {
    std::uint64_t seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 1;
    if (seed_override) seed = *seed_override;
    SimConfig c = default_config(seed);
    if (j.contains("steps")) c.steps = integer(j["steps"], "steps");
    if (j.contains("epsilon")) c.epsilon = number(j["epsilon"], "epsilon");

    if (j.contains("region")) {
      Polygon verts;
      for (const json& v : j["region"].at("vertices")) verts.push_back(vec2(v, "region vertex"));
      c.region = ConvexRegion(verts);
    }
    if (j.contains("density")) c.density = parse_density(j["density"], c.region);

    ModelConfig base;
    if (j.contains("model")) base = parse_model(j["model"], base);

    if (j.contains("robots")) {
      const json& r = j["robots"];
      c.robots.clear();
      if (r.is_object() && r.contains("random")) {
        const int n = integer(r["random"], "robots.random");
        if (n < 1) fail("robots.random must be positive");
        for (const auto& p : random_positions(n, c.region, c.epsilon, r.value("min_separation", 0.05), seed)) {
          c.robots.push_back({p, Eigen::Vector2d::Zero(), base});
        }
      } else if (r.is_array()) {
        for (const json& item : r) {
          RobotInit init;
          init.position = vec2(item.at("position"), "robot position");
          if (item.contains("velocity")) init.velocity = vec2(item["velocity"], "robot velocity");
          init.model = item.contains("model") ? parse_model(item["model"], base) : base;
          c.robots.push_back(init);
        }
      } else {
        fail("robots must be a list or {\"random\": n}");
      }
    } else {
      c.robots.clear();
      for (const auto& p : random_positions(6, c.region, c.epsilon, 0.05, seed)) {
        c.robots.push_back({p, Eigen::Vector2d::Zero(), base});
      }
    }
    const int n = static_cast<int>(c.robots.size());
    if (j.contains("graph")) {
      c.graph = parse_graph(j["graph"], n, seed);
    } else if (n >= 2) {
      c.graph = henneberg_generate(n, seed, 0.5).graph;
    } else {
      c.graph = Graph(n);
    }

    if (j.contains("mpc")) {
      const json& m = j["mpc"];
      if (m.contains("horizon")) c.mpc.horizon = integer(m["horizon"], "mpc.horizon");
      if (m.contains("mu")) c.mpc.mu = number(m["mu"], "mpc.mu");
      if (m.contains("w_b")) c.mpc.w_b = number(m["w_b"], "mpc.w_b");
      if (m.contains("Q")) c.mpc.Q = matrix(m["Q"], 4, "mpc.Q");
      if (m.contains("R")) c.mpc.R = matrix(m["R"], 2, "mpc.R");
      if (m.contains("S_r")) c.mpc.S_r = matrix(m["S_r"], 2, "mpc.S_r");
      if (m.contains("max_iterations")) c.mpc.solver.max_iterations = integer(m["max_iterations"], "mpc.max_iterations");
      if (m.contains("tolerance")) c.mpc.solver.tolerance = number(m["tolerance"], "mpc.tolerance");
      if (m.contains("mu_init")) c.mpc.solver.mu_init = number(m["mu_init"], "mpc.mu_init");
    }
    if (j.contains("terminal")) {
      const json& t = j["terminal"];
      if (t.contains("c_fraction")) c.terminal.c_fraction = number(t["c_fraction"], "terminal.c_fraction");
      if (t.contains("directions")) c.terminal.directions = integer(t["directions"], "terminal.directions");
      if (t.contains("bisection_iterations")) c.terminal.bisection_iterations = integer(t["bisection_iterations"], "terminal.bisection_iterations");
    }
    if (j.contains("coverage")) {
      const json& q = j["coverage"];
      if (q.contains("quadrature_tolerance")) c.quadrature.tolerance = number(q["quadrature_tolerance"], "coverage.quadrature_tolerance");
      if (q.contains("quad_order")) c.quadrature.order = integer(q["quad_order"], "coverage.quad_order");
      if (q.contains("max_level")) c.quadrature.max_level = integer(q["max_level"], "coverage.max_level");
    }
    for (const json& f : j.value("faults", json::array())) {
      c.faults.push_back({integer(f.at("at_step"), "fault at_step"), integer(f.at("robot"), "fault robot")});
    }
    return c;
  } catch (const json::exception& e) {
    fail(std::string("bad field: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    fail(e.what());
  }
}

SimConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_override);
}

void validate_config(const SimConfig& c) {
  const int n = static_cast<int>(c.robots.size());
  if (n < 1) fail("at least one robot is required");
  if (c.steps < 0) fail("steps must be non-negative");
  if (!(c.epsilon >= 0.0)) fail("epsilon must be non-negative");
  if (c.mpc.horizon < 1) fail("mpc.horizon must be at least 1");
  for (int i = 0; i < n; ++i) {
    if (!c.region.contains(c.robots[i].position)) {
      fail("robot " + std::to_string(i) + " starts outside the region");
    }
    for (int k = i + 1; k < n; ++k) {
      if ((c.robots[i].position - c.robots[k].position).norm() < 1e-7) {
        fail("robots " + std::to_string(i) + " and " + std::to_string(k) + " start at the same position");
      }
    }
  }
  if (c.graph.num_vertices() != n) {
    fail("graph has " + std::to_string(c.graph.num_vertices()) + " vertices for " +
         std::to_string(n) + " robots");
  }
  if (n >= 2) {
    const LamanVerdict v = laman_check(c.graph);
    if (!v.is_laman) {
      std::string msg = "graph is not Laman";
      if (!v.count_ok) msg += ": has " + std::to_string(c.graph.num_edges()) + " edges, needs " + std::to_string(2 * n - 3);
      if (v.violating_subset) {
        msg += ": violating subset {";
        for (std::size_t k = 0; k < v.violating_subset->size(); ++k) {
          msg += (k ? "," : "") + std::to_string((*v.violating_subset)[k]);
        }
        msg += "}";
      }
      fail(msg);
    }
  }
  std::set<int> lost, fault_steps;
  for (const FaultEvent& f : c.faults) {
    if (!fault_steps.insert(f.at_step).second) fail("two faults at step " + std::to_string(f.at_step));
    if (f.robot < 0 || f.robot >= n) fail("fault names unknown robot " + std::to_string(f.robot));
    if (f.at_step < 0 || f.at_step >= c.steps) fail("fault step " + std::to_string(f.at_step) + " outside the run");
    if (!lost.insert(f.robot).second) fail("robot " + std::to_string(f.robot) + " fails twice");
  }
  if (!c.faults.empty() && n - static_cast<int>(c.faults.size()) < 2) {
    fail("faults must leave at least two robots");
  }
  for (const auto& r : c.robots) r.model.build();
}

}  // namespace rigcov
