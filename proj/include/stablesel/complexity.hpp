#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablesel/graph.hpp"

namespace stablesel {

// Maximal run of degree <= 2 vertices (target excluded), read off the
// undirected skeleton. Vertices are listed in path order starting from the
// lexicographically smaller endpoint; cycle components are not chains.
struct ChainSummary {
  std::vector<std::string> vertices;
  std::vector<std::string> heads;  // endpoints nearest the target: none, one, or both
  bool two_headed = false;
  bool y_adjacent = false;  // some shortest head-target path avoids every other chain
  bool isolated = false;    // no path reaches another chain's vertex through this one
  std::vector<std::string> removal_order;  // ascending target distance
  unsigned long long cost = 0;  // l+1, or (l^2+l+2)/2 with two heads
};

struct Decomposition {
  std::vector<ChainSummary> chains;       // sorted by first vertex
  std::set<std::string> branch_vertices;  // degree >= 3, target excluded
};

// Chain structure of g around the target; works on the undirected skeleton
// of whatever marks g carries.
Decomposition decompose(const MixedGraph& g, const std::string& target);

// One reduction step applied to a target-adjacent chain: remove the first
// `remove` vertices in removal order, or splice the whole chain out and
// reconnect its two attachment points.
struct ChainOption {
  bool splice = false;
  int remove = 0;
};

// Applies opt to the chain of g matching chain.vertices; isolated chains
// admit only full removal. Returns the reduced undirected skeleton.
MixedGraph apply_opt(const MixedGraph& g, const std::string& target,
                     const ChainSummary& chain, const ChainOption& opt);

struct LeafDiagnostics {
  int leaf_count = 0;    // degree <= 1 vertices, target included
  int branch_count = 0;  // degree >= 3 vertices, target excluded
  bool tree_lemma_applicable = false;  // forest skeleton with a branch vertex
  bool tree_lemma_holds = true;        // leaf_count >= branch_count + 2
  int spanning_tree_leaves = 0;        // search-tree leaves on the target's component
  bool spanning_check_ok = true;       // spanning_tree_leaves * 9 >= branch_count
};

struct ComplexityReport {
  unsigned long long f = 1;  // reachable-projection count of the stable skeleton
  int d_ge3 = 0;
  int d_le2 = 0;
  bool is_tree = false;  // the stable skeleton is a forest
  long long nodes = 0;   // recursion nodes visited
  std::vector<ChainSummary> chains;       // top-level decomposition
  std::optional<unsigned long long> n;    // class count, when certified
  std::string bound_verdict = "not-checked";  // "holds" | "violated" | "not-checked"
  LeafDiagnostics leaves;
};

// Counts the projections reachable by recursively reducing target-adjacent
// chains of the induced stable skeleton, contracting branching neighbors of
// the target into it first. On forest skeletons the count is cross-checked
// against a closed-form tree recursion.
ComplexityReport compute_f(const MixedGraph& g, const ProblemSpec& spec,
                           long long cap_nodes = 1000000);

// compute_f plus the class count n, checking f <= n <= 2^d_ge3 * f. The
// class recovery is skipped (verdict "not-checked") when |stable| exceeds
// class_guard.
ComplexityReport certify_bounds(const MixedGraph& g, const ProblemSpec& spec,
                                int class_guard = 16, long long cap_nodes = 1000000);

// Leaf and branch counts of the stable skeleton, with the forest leaf bound
// and a greedy spanning-tree ratio check.
LeafDiagnostics structural_lemma_checks(const MixedGraph& g, const ProblemSpec& spec);

}  // namespace stablesel
