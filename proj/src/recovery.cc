#include "rigcov/recovery.h"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "rigcov/error.h"

namespace rigcov {

Graph contract_edge(const Graph& g, int v, int w) {
  if (!g.has_edge(v, w)) {
    throw Error(ErrorKind::kInvalidInput, "cannot contract missing edge (" +
                                              std::to_string(v) + "," + std::to_string(w) + ")");
  }
  Graph out(g.num_vertices() - 1);
  const int merged = index_after_removal(v, w);
  for (const Edge& e : g.edges()) {
    int a = e.i == w ? v : e.i;
    int b = e.j == w ? v : e.j;
    if (a == b) continue;
    a = a == v ? merged : index_after_removal(a, w);
    b = b == v ? merged : index_after_removal(b, w);
    if (!out.has_edge(a, b)) out.add_edge(a, b);
  }
  return out;
}

namespace {

int common_neighbor_count(const Graph& g, int v, int w) {
  const auto nv = g.neighbors(v);
  const auto nw = g.neighbors(w);
  std::vector<int> common;
  std::set_intersection(nv.begin(), nv.end(), nw.begin(), nw.end(),
                        std::back_inserter(common));
  return static_cast<int>(common.size());
}

Contractibility contractibility_unchecked(const Graph& g, int v, int w) {
  Contractibility out;
  out.common_neighbors = common_neighbor_count(g, v, w);
  if (out.common_neighbors > 1) {
    out.reason = ContractionReason::kPreFilter;
    out.contractible = false;
    return out;
  }
  const Graph contracted = contract_edge(g, v, w);
  out.reason = ContractionReason::kVerified;
  out.contractible = contracted.num_vertices() >= 2 && laman_check(contracted).is_laman;
  return out;
}

// Visits (k)-subsets of [0, n) in lexicographic order until `fn` returns true.
template <typename Fn>
bool for_each_combination(int n, int k, Fn&& fn) {
  if (k > n) return false;
  std::vector<int> idx(k);
  for (int t = 0; t < k; ++t) idx[t] = t;
  while (true) {
    if (fn(idx)) return true;
    int t = k - 1;
    while (t >= 0 && idx[t] == n - k + t) --t;
    if (t < 0) return false;
    ++idx[t];
    for (int s = t + 1; s < k; ++s) idx[s] = idx[s - 1] + 1;
  }
}

}  // namespace

Contractibility is_contractible(const Graph& g, int v, int w) {
  if (!g.has_edge(v, w)) {
    throw Error(ErrorKind::kInvalidInput, "edge (" + std::to_string(v) + "," +
                                              std::to_string(w) + ") not in graph");
  }
  if (g.num_vertices() < 2 || !laman_check(g).is_laman) {
    throw Error(ErrorKind::kInvalidInput, "is_contractible needs a Laman graph");
  }
  return contractibility_unchecked(g, v, w);
}

Graph apply_repair(const Graph& g, int lost, const std::vector<Edge>& repair) {
  Graph out = remove_vertex(g, lost);
  for (const Edge& e : repair) {
    if (e.i == lost || e.j == lost) {
      throw Error(ErrorKind::kInvalidInput, "repair edge touches the lost vertex");
    }
    out.add_edge(index_after_removal(e.i, lost), index_after_removal(e.j, lost));
  }
  return out;
}

ClosingRanks closing_ranks(const Graph& g, int lost, int dim) {
  if (dim != 2) {
    throw Error(ErrorKind::kUnsupportedDimension,
                "closing ranks is only available for d = 2, got d = " + std::to_string(dim));
  }
  if (lost < 0 || lost >= g.num_vertices()) {
    throw Error(ErrorKind::kInvalidInput, "lost vertex " + std::to_string(lost) + " out of range");
  }
  if (g.num_vertices() < 3 || !laman_check(g).is_laman) {
    throw Error(ErrorKind::kRecoveryInfeasible,
                "input is not a minimally rigid graph on at least 3 vertices");
  }
  const std::vector<int> nbrs = g.neighbors(lost);
  const int alpha = static_cast<int>(nbrs.size());
  if (alpha < 2) {
    throw Error(ErrorKind::kRecoveryInfeasible,
                "vertex " + std::to_string(lost) + " has degree " + std::to_string(alpha));
  }

  ClosingRanks out;
  if (alpha == 2) {
    if (!laman_check(remove_vertex(g, lost)).is_laman) {
      throw Error(ErrorKind::kRecoveryInfeasible, "degree-2 removal left a non-Laman graph");
    }
    return out;
  }

  // Contraction onto the smallest-index neighbour that works.
  for (int q : nbrs) {
    if (!contractibility_unchecked(g, lost, q).contractible) continue;
    for (int w : nbrs) {
      if (w != q && !g.has_edge(q, w)) out.new_edges.emplace_back(q, w);
    }
    out.contraction_vertex = q;
    return out;
  }

  // Fallback: exhaustive search over (alpha - 2)-subsets of missing
  // neighbour pairs.
  std::vector<Edge> candidates;
  for (int a = 0; a < alpha; ++a) {
    for (int b = a + 1; b < alpha; ++b) {
      if (!g.has_edge(nbrs[a], nbrs[b])) candidates.emplace_back(nbrs[a], nbrs[b]);
    }
  }
  const bool found = for_each_combination(
      static_cast<int>(candidates.size()), alpha - 2, [&](const std::vector<int>& pick) {
        std::vector<Edge> repair;
        for (int t : pick) repair.push_back(candidates[t]);
        if (!laman_check(apply_repair(g, lost, repair)).is_laman) return false;
        out.new_edges = std::move(repair);
        return true;
      });
  if (!found) {
    throw Error(ErrorKind::kRecoveryInfeasible,
                "no repairing edge set for vertex " + std::to_string(lost));
  }
  return out;
}

RecoveryPlan build_recovery_plan(const Graph& g, int dim, int threads) {
  if (dim != 2) {
    throw Error(ErrorKind::kUnsupportedDimension,
                "recovery plans are only available for d = 2");
  }
  if (g.num_vertices() < 2 || !laman_check(g).is_laman) {
    throw Error(ErrorKind::kInvalidInput, "recovery plan needs a Laman graph");
  }
  const int n = g.num_vertices();
  // The repair for a lost j does not depend on which neighbour asks, so each
  // vertex is solved once and fanned out to every (i, j) entry.
  std::vector<std::optional<ClosingRanks>> per_vertex(n);
  std::vector<std::exception_ptr> failures(n);
  auto solve = [&](int j) {
    try {
      per_vertex[j] = closing_ranks(g, j, dim);
    } catch (...) {
      failures[j] = std::current_exception();
    }
  };
  if (threads > 1) {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int j = t; j < n; j += threads) solve(j);
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (int j = 0; j < n; ++j) solve(j);
  }

  RecoveryPlan plan;
  for (int j = 0; j < n; ++j) {
    const auto nbrs = g.neighbors(j);
    if (failures[j]) {
      try {
        std::rethrow_exception(failures[j]);
      } catch (const Error& e) {
        const int i = nbrs.empty() ? -1 : nbrs.front();
        throw Error(ErrorKind::kRecoveryInfeasible,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
      }
    }
    for (int i : nbrs) {
      plan.entries[{i, j}] = {per_vertex[j]->contraction_vertex, per_vertex[j]->new_edges};
    }
  }
  return plan;
}

}  // namespace rigcov
