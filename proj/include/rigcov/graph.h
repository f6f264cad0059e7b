#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

namespace rigcov {

/// Undirected edge stored with the smaller endpoint first.
struct Edge {
  int i = 0;
  int j = 0;

  Edge() = default;
  Edge(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {}

  auto operator<=>(const Edge&) const = default;
};

/// Simple undirected graph on vertices 0..n-1. Edges are kept sorted, which
/// fixes a canonical edge order for everything downstream (bearing vectors,
/// JSON output, random edge picks).
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n_vertices);
  Graph(int n_vertices, const std::vector<std::pair<int, int>>& edges);

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Throws invalid-input on self loops, duplicates or out-of-range endpoints.
  void add_edge(int a, int b);
  bool remove_edge(int a, int b);
  bool has_edge(int a, int b) const;

  const std::set<Edge>& edges() const { return edges_; }
  std::vector<Edge> edge_list() const { return {edges_.begin(), edges_.end()}; }
  std::vector<int> neighbors(int v) const;
  int degree(int v) const;

  bool operator==(const Graph&) const = default;

 private:
  int n_ = 0;
  std::set<Edge> edges_;
};

/// Vertex v removed together with its incident edges; vertices above v shift
/// down by one.
Graph remove_vertex(const Graph& g, int v);

/// Index of vertex `old_index` after `removed` has been deleted.
inline int index_after_removal(int old_index, int removed) {
  return old_index > removed ? old_index - 1 : old_index;
}

// ---------------------------------------------------------------------------
// Laman counting

enum class LamanMethod { kAuto, kExhaustive, kPebbleGame };

struct LamanVerdict {
  bool is_laman = false;
  bool count_ok = false;
  /// A vertex set S with |S| >= 2 spanning more than 2|S| - 3 edges. Only
  /// reported when the global count condition holds.
  std::optional<std::vector<int>> violating_subset;
};

/// kAuto enumerates subsets for n <= 12 and runs the (2,3) pebble game above.
LamanVerdict laman_check(const Graph& g, LamanMethod method = LamanMethod::kAuto);

/// Number of edges with both endpoints in `subset`.
int induced_edge_count(const Graph& g, const std::vector<int>& subset);

// ---------------------------------------------------------------------------
// Henneberg construction

struct VertexAddition {
  int i = 0;
  int j = 0;
  bool operator==(const VertexAddition&) const = default;
};

/// (i, j) is the edge that gets deleted; k is the third anchor.
struct EdgeSplitting {
  int i = 0;
  int j = 0;
  int k = 0;
  bool operator==(const EdgeSplitting&) const = default;
};

using HennebergStep = std::variant<VertexAddition, EdgeSplitting>;

/// Appends vertex n. Throws invalid-step if the step does not fit `g`.
Graph henneberg_apply(const Graph& g, const HennebergStep& step);

struct HennebergResult {
  Graph graph;
  std::vector<HennebergStep> log;
};

/// Grows a Laman graph from a single edge with n - 2 random steps. Edge
/// splitting is picked with `split_probability` whenever it is possible.
HennebergResult henneberg_generate(int n, std::uint64_t seed,
                                   double split_probability);

/// Re-applies a step log starting from the single edge on two vertices.
Graph henneberg_replay(const std::vector<HennebergStep>& log);

}  // namespace rigcov
