#include "rigcov/graph.h"

#include <algorithm>
#include <bit>
#include <string>

#include "rigcov/error.h"
#include "rigcov/rng.h"

namespace rigcov {

namespace {

constexpr int kExhaustiveLimit = 12;
constexpr int kExhaustiveHardLimit = 22;

std::string edge_str(int a, int b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace

Graph::Graph(int n_vertices) : n_(n_vertices) {
  if (n_vertices < 0) {
    throw Error(ErrorKind::kInvalidInput, "negative vertex count");
  }
}

Graph::Graph(int n_vertices, const std::vector<std::pair<int, int>>& edges)
    : Graph(n_vertices) {
  for (const auto& [a, b] : edges) add_edge(a, b);
}

void Graph::add_edge(int a, int b) {
  if (a == b) {
    throw Error(ErrorKind::kInvalidInput, "self loop at vertex " + std::to_string(a));
  }
  if (a < 0 || b < 0 || a >= n_ || b >= n_) {
    throw Error(ErrorKind::kInvalidInput,
                "edge " + edge_str(a, b) + " out of range for n=" + std::to_string(n_));
  }
  if (!edges_.insert(Edge(a, b)).second) {
    throw Error(ErrorKind::kInvalidInput, "duplicate edge " + edge_str(a, b));
  }
}

bool Graph::remove_edge(int a, int b) { return edges_.erase(Edge(a, b)) > 0; }

bool Graph::has_edge(int a, int b) const {
  if (a == b) return false;
  return edges_.contains(Edge(a, b));
}

std::vector<int> Graph::neighbors(int v) const {
  std::vector<int> out;
  for (const Edge& e : edges_) {
    if (e.i == v) out.push_back(e.j);
    else if (e.j == v) out.push_back(e.i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Graph::degree(int v) const {
  int d = 0;
  for (const Edge& e : edges_) d += (e.i == v || e.j == v) ? 1 : 0;
  return d;
}

Graph remove_vertex(const Graph& g, int v) {
  if (v < 0 || v >= g.num_vertices()) {
    throw Error(ErrorKind::kInvalidInput, "vertex " + std::to_string(v) + " out of range");
  }
  Graph out(g.num_vertices() - 1);
  for (const Edge& e : g.edges()) {
    if (e.i == v || e.j == v) continue;
    out.add_edge(index_after_removal(e.i, v), index_after_removal(e.j, v));
  }
  return out;
}

int induced_edge_count(const Graph& g, const std::vector<int>& subset) {
  std::vector<char> in(g.num_vertices(), 0);
  for (int v : subset) in.at(v) = 1;
  int count = 0;
  for (const Edge& e : g.edges()) count += (in[e.i] && in[e.j]) ? 1 : 0;
  return count;
}

// ---------------------------------------------------------------------------
// Laman counting

namespace {

std::optional<std::vector<int>> exhaustive_violation(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<std::uint32_t> adj(n, 0);
  for (const Edge& e : g.edges()) {
    adj[e.i] |= 1u << e.j;
    adj[e.j] |= 1u << e.i;
  }
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
    const int k = std::popcount(mask);
    if (k < 2) continue;
    int twice = 0;
    for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      twice += std::popcount(adj[v] & mask);
    }
    if (twice / 2 > 2 * k - 3) {
      std::vector<int> subset;
      for (int v = 0; v < n; ++v) {
        if (mask & (1u << v)) subset.push_back(v);
      }
      return subset;
    }
  }
  return std::nullopt;
}

// (2,3) pebble game. Every vertex starts with two pebbles; an edge is
// independent iff four pebbles can be gathered on its endpoints.
class PebbleGame {
 public:
  explicit PebbleGame(int n) : pebbles_(n, 2), out_(n) {}

  bool insert(int u, int v) {
    while (pebbles_[u] < 2) {
      if (!fetch_pebble(u, v)) return false;
    }
    while (pebbles_[v] < 2) {
      if (!fetch_pebble(v, u)) return false;
    }
    --pebbles_[u];
    out_[u].push_back(v);
    return true;
  }

  // Vertices reachable from u or v along directed edges. After a failed
  // insert this set spans at least 2|S| - 2 edges of the input graph.
  std::vector<int> reach(int u, int v) const {
    std::vector<char> seen(pebbles_.size(), 0);
    std::vector<int> stack{u, v};
    seen[u] = seen[v] = 1;
    while (!stack.empty()) {
      const int w = stack.back();
      stack.pop_back();
      for (int x : out_[w]) {
        if (!seen[x]) {
          seen[x] = 1;
          stack.push_back(x);
        }
      }
    }
    std::vector<int> out;
    for (int w = 0; w < static_cast<int>(seen.size()); ++w) {
      if (seen[w]) out.push_back(w);
    }
    return out;
  }

 private:
  // Moves one free pebble onto `root` by reversing a directed path. The
  // `blocked` vertex keeps its pebbles.
  bool fetch_pebble(int root, int blocked) {
    const int n = static_cast<int>(pebbles_.size());
    std::vector<int> parent(n, -1);
    std::vector<char> seen(n, 0);
    seen[root] = 1;
    seen[blocked] = 1;
    std::vector<int> stack{root};
    int found = -1;
    while (!stack.empty() && found < 0) {
      const int w = stack.back();
      stack.pop_back();
      for (int x : out_[w]) {
        if (seen[x]) continue;
        seen[x] = 1;
        parent[x] = w;
        if (pebbles_[x] > 0) {
          found = x;
          break;
        }
        stack.push_back(x);
      }
    }
    if (found < 0) return false;
    for (int c = found; c != root; c = parent[c]) {
      const int p = parent[c];
      auto& edges = out_[p];
      edges.erase(std::find(edges.begin(), edges.end(), c));
      out_[c].push_back(p);
    }
    --pebbles_[found];
    ++pebbles_[root];
    return true;
  }

  std::vector<int> pebbles_;
  std::vector<std::vector<int>> out_;
};

std::optional<std::vector<int>> pebble_violation(const Graph& g) {
  PebbleGame game(g.num_vertices());
  for (const Edge& e : g.edges()) {
    if (!game.insert(e.i, e.j)) return game.reach(e.i, e.j);
  }
  return std::nullopt;
}

}  // namespace

LamanVerdict laman_check(const Graph& g, LamanMethod method) {
  const int n = g.num_vertices();
  if (n < 2) {
    throw Error(ErrorKind::kInvalidInput, "laman_check needs at least 2 vertices");
  }
  LamanVerdict verdict;
  verdict.count_ok = g.num_edges() == 2 * n - 3;
  if (!verdict.count_ok) return verdict;

  if (method == LamanMethod::kAuto) {
    method = n <= kExhaustiveLimit ? LamanMethod::kExhaustive : LamanMethod::kPebbleGame;
  }
  if (method == LamanMethod::kExhaustive) {
    if (n > kExhaustiveHardLimit) {
      throw Error(ErrorKind::kInvalidInput,
                  "exhaustive Laman check limited to n <= " +
                      std::to_string(kExhaustiveHardLimit));
    }
    verdict.violating_subset = exhaustive_violation(g);
  } else {
    verdict.violating_subset = pebble_violation(g);
  }
  verdict.is_laman = !verdict.violating_subset.has_value();
  return verdict;
}

// ---------------------------------------------------------------------------
// Henneberg construction

Graph henneberg_apply(const Graph& g, const HennebergStep& step) {
  const int n = g.num_vertices();
  auto in_range = [n](int v) { return v >= 0 && v < n; };
  Graph out(n + 1);
  if (const auto* add = std::get_if<VertexAddition>(&step)) {
    if (add->i == add->j || !in_range(add->i) || !in_range(add->j)) {
      throw Error(ErrorKind::kInvalidStep,
                  "vertex addition needs two distinct existing vertices, got " +
                      edge_str(add->i, add->j));
    }
    for (const Edge& e : g.edges()) out.add_edge(e.i, e.j);
    out.add_edge(n, add->i);
    out.add_edge(n, add->j);
    return out;
  }
  const auto& split = std::get<EdgeSplitting>(step);
  const bool distinct = split.i != split.j && split.i != split.k && split.j != split.k;
  if (!distinct || !in_range(split.i) || !in_range(split.j) || !in_range(split.k)) {
    throw Error(ErrorKind::kInvalidStep, "edge splitting needs three distinct existing vertices");
  }
  if (!g.has_edge(split.i, split.j)) {
    throw Error(ErrorKind::kInvalidStep,
                "edge " + edge_str(split.i, split.j) + " to split is not in the graph");
  }
  for (const Edge& e : g.edges()) {
    if (e == Edge(split.i, split.j)) continue;
    out.add_edge(e.i, e.j);
  }
  out.add_edge(n, split.i);
  out.add_edge(n, split.j);
  out.add_edge(n, split.k);
  return out;
}

HennebergResult henneberg_generate(int n, std::uint64_t seed, double split_probability) {
  if (n < 2) {
    throw Error(ErrorKind::kInvalidInput, "henneberg_generate needs n >= 2");
  }
  if (!(split_probability >= 0.0 && split_probability <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "split probability must lie in [0, 1]");
  }
  Rng rng(seed);
  HennebergResult result{Graph(2, {{0, 1}}), {}};
  for (int current = 2; current < n; ++current) {
    HennebergStep step;
    const bool can_split = current >= 3;
    if (can_split && rng.uniform() < split_probability) {
      const auto edges = result.graph.edge_list();
      const Edge e = edges[rng.index(edges.size())];
      int k = static_cast<int>(rng.index(current - 2));
      // Skip over the two split endpoints (e.i < e.j).
      if (k >= e.i) ++k;
      if (k >= e.j) ++k;
      step = EdgeSplitting{e.i, e.j, k};
    } else {
      const int i = static_cast<int>(rng.index(current));
      int j = static_cast<int>(rng.index(current - 1));
      if (j >= i) ++j;
      step = VertexAddition{i, j};
    }
    result.graph = henneberg_apply(result.graph, step);
    result.log.push_back(step);
  }
  return result;
}

Graph henneberg_replay(const std::vector<HennebergStep>& log) {
  Graph g(2, {{0, 1}});
  for (const auto& step : log) g = henneberg_apply(g, step);
  return g;
}

}  // namespace rigcov
