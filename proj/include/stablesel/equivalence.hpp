#pragma once

#include <set>
#include <string>
#include <vector>

#include "stablesel/graph.hpp"

namespace stablesel {

// One cell of the stable-subset partition. Members are exactly the sets
// representative | T for T subset of free, so the cell has 2^|free| members.
struct EquivalenceClass {
  std::set<std::string> representative;
  std::set<std::string> free;

  unsigned long long size() const;
  std::vector<std::set<std::string>> members() const;
};

struct Partition {
  std::vector<EquivalenceClass> classes;  // sorted by representative
  long long nodes = 0;                    // recursion nodes visited, 0 for brute force
};

// True when s1 and s2 induce the same worst-case risk for every structural
// model compatible with the graph: some subset of s1 & s2 separates the
// target from the rest of s1 | s2 in the induced stable subgraph.
bool are_equivalent(const MixedGraph& g, const ProblemSpec& spec,
                    const std::set<std::string>& s1, const std::set<std::string>& s2);

// Partition of all subsets of spec.stable into risk-equivalence classes via
// recursive latent projection. Runs in time proportional to the class count,
// not the subset count.
Partition recover_classes(const MixedGraph& g, const ProblemSpec& spec);

// Same partition by exhaustive pairwise equivalence tests over all 2^d
// subsets. Exponential; refuses when |spec.stable| exceeds cap.
Partition brute_force_partition(const MixedGraph& g, const ProblemSpec& spec, int cap = 8);

// The unique class containing s. InputError when s is not a subset of
// stable; InvariantError when the partition does not cover s exactly once.
const EquivalenceClass& class_of(const Partition& p, const std::set<std::string>& s,
                                 const std::set<std::string>& stable);

}  // namespace stablesel
