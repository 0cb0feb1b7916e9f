#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stablesel/graph.hpp"

namespace stablesel {

// Dag over the model variables plus one environment marker: a root vertex
// whose children are exactly the variables that shift across environments.
struct AugmentedGraph {
  MixedGraph graph;
  std::string env_vertex;

  AugmentedGraph(MixedGraph graph_in, std::string env_vertex_in);
};

// Adds an environment marker named env_name with an edge into every mutable
// variable.
AugmentedGraph augment(const MixedGraph& g, const ProblemSpec& spec,
                       const std::string& env_name = "E_tr");

// Conditional-independence interface the discovery pipeline runs against.
// variables() includes the environment marker.
class CiOracle {
 public:
  virtual ~CiOracle() = default;
  virtual const std::vector<std::string>& variables() const = 0;
  virtual const std::string& env_marker() const = 0;
  virtual bool independent(const std::string& a, const std::string& b,
                           const std::set<std::string>& z) = 0;
  long long query_count() const { return queries_; }

 protected:
  long long queries_ = 0;
};

// Exact oracle: separation in a hidden augmented graph.
class GraphCiOracle : public CiOracle {
 public:
  explicit GraphCiOracle(AugmentedGraph aug);
  const std::vector<std::string>& variables() const override;
  const std::string& env_marker() const override;
  bool independent(const std::string& a, const std::string& b,
                   const std::set<std::string>& z) override;

 private:
  AugmentedGraph aug_;
};

// Likelihood-ratio test of independence on integer-coded samples, stratified
// by the conditioning configuration. Columns are recoded to dense values;
// the degrees of freedom count only conditioning configurations that occur.
class GTestCiOracle : public CiOracle {
 public:
  GTestCiOracle(std::vector<std::string> names, std::vector<std::vector<int>> rows,
                std::string env_marker, double alpha = 0.05);
  // Header row of variable names; integer cells except the env column, whose
  // distinct strings are mapped to codes.
  static GTestCiOracle from_csv(std::istream& in, const std::string& env_column = "env",
                                double alpha = 0.05);

  const std::vector<std::string>& variables() const override;
  const std::string& env_marker() const override;
  bool independent(const std::string& a, const std::string& b,
                   const std::set<std::string>& z) override;
  double alpha() const { return alpha_; }

 private:
  std::vector<std::string> names_;       // sorted
  std::vector<std::vector<int>> cols_;   // dense-coded, aligned with names_
  std::vector<int> card_;                // distinct values per column
  std::string env_marker_;
  double alpha_;
  std::size_t n_rows_ = 0;

  int col_of(const std::string& v) const;
};

// Answers how the edge between two adjacent variables is oriented.
class OrientationOracle {
 public:
  virtual ~OrientationOracle() = default;
  virtual bool orients_toward(const std::string& from, const std::string& to) = 0;
};

class GraphOrientationOracle : public OrientationOracle {
 public:
  explicit GraphOrientationOracle(const MixedGraph& g) : g_(&g) {}
  bool orients_toward(const std::string& from, const std::string& to) override;

 private:
  const MixedGraph* g_;
};

struct MutableScan {
  std::set<std::string> mutable_vars;
  // Minimal separating set from the environment marker, per non-mutable
  // variable; found by searching candidate sets in increasing size.
  std::map<std::string, std::set<std::string>> registry;
};

// Classifies every non-marker variable by whether anything separates it from
// the environment marker.
MutableScan find_mutable(CiOracle& oracle);

struct Skeleton {
  std::vector<std::pair<std::string, std::string>> edges;  // u < v, sorted
  // Separating set per non-adjacent pair; conditioning candidates include
  // the environment marker.
  std::map<std::pair<std::string, std::string>, std::set<std::string>> separators;

  bool adjacent(const std::string& u, const std::string& v) const;
  std::set<std::string> neighbors(const std::string& v) const;
};

// Adjacency structure over the non-marker variables.
Skeleton find_skeleton(CiOracle& oracle);

// Mutable children of the target: mutable skeleton neighbors of the target
// that reopen the target-marker dependence when added to the registry set.
std::set<std::string> detect_xm0(CiOracle& oracle, const std::string& target,
                                 const std::set<std::string>& mutable_vars,
                                 const std::map<std::string, std::set<std::string>>& registry,
                                 const Skeleton& skeleton);

// xm0 together with everything reachable from it through descendant probes.
std::set<std::string> recover_descendant_closure(
    CiOracle& oracle, const std::string& target, const std::set<std::string>& xm0,
    const std::set<std::string>& mutable_vars,
    const std::map<std::string, std::set<std::string>>& registry, const Skeleton& skeleton);

struct Orientations {
  std::map<std::string, std::set<std::string>> descendants;  // per mutable, excluding itself
  std::map<std::string, std::set<std::string>> parents;      // per mutable
  std::set<std::pair<std::string, std::string>> edges;       // (from, to)
};

// Orients the neighborhood reachable from each mutable variable, using
// marker probes for non-mutable neighbors and the orientation oracle for
// mutable ones. Conflicting orientations raise InvariantError.
Orientations recover_orientations(CiOracle& oracle, OrientationOracle& orient,
                                  const std::string& target,
                                  const std::set<std::string>& mutable_vars,
                                  const std::map<std::string, std::set<std::string>>& registry,
                                  const Skeleton& skeleton);

struct DiscoveryResult {
  std::vector<std::string> vars;  // non-marker variables, sorted
  std::string target;
  std::set<std::string> mutable_vars;
  std::map<std::string, std::set<std::string>> registry;
  std::vector<std::pair<std::string, std::string>> skeleton;
  std::set<std::string> xm0;
  std::set<std::string> closure;  // xm0 included
  std::set<std::string> w;        // closure minus xm0
  bool condition_holds = false;
  std::map<std::string, std::set<std::string>> descendants;  // filled when orienting
  std::map<std::string, std::set<std::string>> parents;
  std::set<std::pair<std::string, std::string>> oriented;
  long long queries = 0;
};

// Full pipeline; pass an orientation oracle to also recover per-mutable
// descendants and parents.
DiscoveryResult run_discovery(CiOracle& oracle, const std::string& target,
                              OrientationOracle* orient = nullptr);

// True when no strict descendant recovered from the mutable children is
// skeleton-adjacent to the target.
bool test_condition(CiOracle& oracle, const std::string& target);

}  // namespace stablesel
