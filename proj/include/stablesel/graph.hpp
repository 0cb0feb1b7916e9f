#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stablesel {

enum class Mark { tail, arrow };

enum class GraphKind { dag, mag };

// Single edge between two distinct vertices, with one endpoint mark per side.
// A directed edge u -> v carries (mark_u = tail, mark_v = arrow); u <-> v is
// (arrow, arrow); u -- v is (tail, tail). Stored canonically with u < v.
struct Edge {
  std::string u;
  std::string v;
  Mark mark_u = Mark::tail;
  Mark mark_v = Mark::arrow;
};

// Immutable mixed graph. dag kind admits only directed edges and must be
// acyclic; mag kind must be ancestral: no directed or almost-directed cycle,
// and endpoints of undirected edges have no incoming arrowheads.
class MixedGraph {
 public:
  MixedGraph(GraphKind kind, std::vector<std::string> vertices, std::vector<Edge> edges);

  // Acyclic directed graph from (parent, child) pairs.
  static MixedGraph dag(std::vector<std::string> vertices,
                        const std::vector<std::pair<std::string, std::string>>& arcs);

  GraphKind kind() const { return kind_; }
  const std::vector<std::string>& vertex_ids() const { return vertices_; }  // sorted
  const std::vector<Edge>& edges() const { return edges_; }  // sorted by (u, v)
  std::size_t vertex_count() const { return vertices_.size(); }

  bool has_vertex(const std::string& v) const;
  bool adjacent(const std::string& u, const std::string& v) const;
  std::optional<Edge> edge_between(const std::string& u, const std::string& v) const;
  // Mark at `at` on its edge with `other`; the edge must exist.
  Mark mark_at(const std::string& at, const std::string& other) const;

  std::set<std::string> parents(const std::string& v) const;
  std::set<std::string> children(const std::string& v) const;
  std::set<std::string> neighbors(const std::string& v) const;  // any edge kind
  int degree(const std::string& v) const;

  // Reflexive transitive closures along directed (tail -> arrow) edges.
  std::set<std::string> ancestors(const std::set<std::string>& of) const;
  std::set<std::string> descendants(const std::set<std::string>& of) const;
  std::set<std::string> ancestors(const std::string& of) const;
  std::set<std::string> descendants(const std::string& of) const;

  // Subgraph over `keep`, edges restricted to pairs inside it. Same kind.
  MixedGraph induced(const std::set<std::string>& keep) const;

  int index_of(const std::string& v) const;  // position in vertex_ids()

 private:
  GraphKind kind_;
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::map<std::string, int> index_;
  // Incident edges seen from each endpoint: (other, mark here, mark there).
  struct HalfEdge {
    int to;
    Mark mark_from;
    Mark mark_to;
  };
  std::vector<std::vector<HalfEdge>> inc_;
  std::vector<std::vector<int>> dir_parents_;
  std::vector<std::vector<int>> dir_children_;

  void build_index();
  void validate() const;
  friend bool is_separated(const MixedGraph&, const std::set<std::string>&,
                           const std::set<std::string>&, const std::set<std::string>&);
};

// Target plus a partition of the remaining vertices into stable and mutable.
struct ProblemSpec {
  std::string target;
  std::set<std::string> stable;
  std::set<std::string> mutable_vars;
};

// Throws InputError unless target, stable, and mutable_vars partition g's
// vertex set with the target outside both parts.
void validate_spec(const MixedGraph& g, const ProblemSpec& spec);

// Vertex sequence; valid when nonempty, repeat-free, and consecutive
// vertices are adjacent.
struct Path {
  std::vector<std::string> vertices;
};

bool is_path(const MixedGraph& g, const Path& p);

// Deletes every edge whose arrowhead endpoint lies in `targets`. Requires a
// dag; in a dag this removes exactly the edges into `targets`. Idempotent.
MixedGraph mutilate(const MixedGraph& g, const std::set<std::string>& targets);

// d-separation (dag) / m-separation (mag) of a and b given z. The sets must
// be pairwise disjoint; empty a or b is vacuously separated.
bool is_separated(const MixedGraph& g, const std::set<std::string>& a,
                  const std::set<std::string>& b, const std::set<std::string>& z);

// Parents-before-children order with lexicographic tie break. Dags only.
std::vector<std::string> topological_order(const MixedGraph& g);

}  // namespace stablesel
