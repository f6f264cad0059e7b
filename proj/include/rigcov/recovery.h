#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rigcov/graph.h"

namespace rigcov {

/// Merges w into v and drops w. Edges collapse without duplicates; vertices
/// above w shift down by one, so v keeps index_after_removal(v, w).
Graph contract_edge(const Graph& g, int v, int w);

enum class ContractionReason {
  /// More than one common neighbour, rejected without contracting.
  kPreFilter,
  /// Decided by contracting and Laman-checking the result.
  kVerified,
};

struct Contractibility {
  bool contractible = false;
  ContractionReason reason = ContractionReason::kVerified;
  int common_neighbors = 0;
};

/// Requires a Laman graph and an existing edge (v, w).
Contractibility is_contractible(const Graph& g, int v, int w);

struct ClosingRanks {
  /// Edges to add, in the indices of the original graph.
  std::vector<Edge> new_edges;
  /// Neighbour merged with the lost vertex, when the repair came from an edge
  /// contraction. Empty for degree-2 losses and for the exhaustive fallback.
  std::optional<int> contraction_vertex;
};

/// Minimal edge set among the neighbours of `lost` that restores the Laman
/// property after `lost` is removed. Only d = 2 is supported.
ClosingRanks closing_ranks(const Graph& g, int lost, int dim = 2);

/// The graph left after losing `lost` and adding `repair`; survivors are
/// renumbered as in remove_vertex.
Graph apply_repair(const Graph& g, int lost, const std::vector<Edge>& repair);

struct RecoveryEntry {
  std::optional<int> contraction_vertex;
  std::vector<Edge> new_edges;
};

/// Keyed by (robot i, neighbour j): what to do when j is lost.
struct RecoveryPlan {
  std::map<std::pair<int, int>, RecoveryEntry> entries;
};

/// Throws invalid-input on a non-Laman graph and recovery-infeasible (naming
/// the pair) when some loss cannot be repaired. `threads` > 1 computes the
/// per-vertex repairs concurrently.
RecoveryPlan build_recovery_plan(const Graph& g, int dim = 2, int threads = 0);

}  // namespace rigcov
