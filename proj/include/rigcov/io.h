#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "rigcov/bearing.h"
#include "rigcov/graph.h"
#include "rigcov/recovery.h"

namespace rigcov {

/// printf("%.9g"), with nan and inf spelled out.
std::string format_number(double value);

std::string read_text_file(const std::string& path);
/// Throws io when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

/// {"n": 4, "edges": [[0, 1], ...]}, optionally with the Henneberg log.
std::string graph_to_json(const Graph& g, const std::vector<HennebergStep>* log = nullptr);
Graph graph_from_json(const std::string& text);

/// Graph fields plus "dim" (default 2) and "positions": [[x, y], ...]; the
/// graph may also sit under a "graph" key.
Framework framework_from_json(const std::string& text);

std::string plan_to_json(const RecoveryPlan& plan);
std::string repair_to_json(int lost, const ClosingRanks& repair, const Graph& repaired);

/// Either a bare list of [x, y] pairs or {"positions": [...]}.
std::vector<Eigen::Vector2d> positions_from_json(const std::string& text);

}  // namespace rigcov
