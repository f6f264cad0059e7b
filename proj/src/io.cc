#include "rigcov/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rigcov/error.h"

namespace rigcov {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

json edges_json(const Graph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j});
  return edges;
}

Graph graph_from(const json& j) {
  if (!j.is_object() || !j.contains("n")) throw Error(ErrorKind::kInvalidInput, "graph needs \"n\"");
  Graph g(j["n"].get<int>());
  for (const json& e : j.value("edges", json::array())) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::kInvalidInput, "edges must be pairs");
    g.add_edge(e[0].get<int>(), e[1].get<int>());
  }
  return g;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

std::string graph_to_json(const Graph& g, const std::vector<HennebergStep>* log) {
  json j;
  j["n"] = g.num_vertices();
  j["edges"] = edges_json(g);
  if (log) {
    json steps = json::array();
    for (const HennebergStep& s : *log) {
      if (const auto* va = std::get_if<VertexAddition>(&s)) {
        steps.push_back({{"type", "vertex_addition"}, {"i", va->i}, {"j", va->j}});
      } else {
        const auto& es = std::get<EdgeSplitting>(s);
        steps.push_back({{"type", "edge_splitting"}, {"i", es.i}, {"j", es.j}, {"k", es.k}});
      }
    }
    j["henneberg_log"] = steps;
  }
  return j.dump(2) + "\n";
}

Graph graph_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    return graph_from(j.contains("graph") ? j["graph"] : j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("bad graph: ") + e.what());
  }
}

Framework framework_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    Graph g = graph_from(j.contains("graph") ? j["graph"] : j);
    const int dim = j.value("dim", 2);
    std::vector<Eigen::VectorXd> points;
    for (const json& p : j.at("positions")) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
      for (std::size_t k = 0; k < p.size(); ++k) v(static_cast<Eigen::Index>(k)) = p[k].get<double>();
      if (v.size() != dim) throw Error(ErrorKind::kInvalidInput, "position of wrong dimension");
      points.push_back(v);
    }
    return Framework(std::move(g), Configuration(dim, points));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("bad framework: ") + e.what());
  }
}

std::string plan_to_json(const RecoveryPlan& plan) {
  json entries = json::array();
  for (const auto& [key, entry] : plan.entries) {
    json e;
    e["robot"] = key.first;
    e["lost"] = key.second;
    e["contraction_vertex"] = entry.contraction_vertex ? json(*entry.contraction_vertex) : json(nullptr);
    json edges = json::array();
    for (const Edge& x : entry.new_edges) edges.push_back({x.i, x.j});
    e["new_edges"] = edges;
    entries.push_back(e);
  }
  return json{{"entries", entries}}.dump(2) + "\n";
}

std::string repair_to_json(int lost, const ClosingRanks& repair, const Graph& repaired) {
  json j;
  j["lost"] = lost;
  j["contraction_vertex"] =
      repair.contraction_vertex ? json(*repair.contraction_vertex) : json(nullptr);
  json edges = json::array();
  for (const Edge& x : repair.new_edges) edges.push_back({x.i, x.j});
  j["new_edges"] = edges;
  j["repaired_graph"] = {{"n", repaired.num_vertices()}, {"edges", edges_json(repaired)}};
  return j.dump(2) + "\n";
}

std::vector<Eigen::Vector2d> positions_from_json(const std::string& text) {
  const json j = parse(text);
  const json& list = j.is_object() ? j.at("positions") : j;
  std::vector<Eigen::Vector2d> out;
  try {
    for (const json& p : list) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::kInvalidInput, "positions must be [x, y] pairs");
      out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("bad positions: ") + e.what());
  }
  return out;
}

}  // namespace rigcov
