#include "stablesel/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "stablesel/error.hpp"

namespace stablesel {

namespace {

Edge canonical(const Edge& e) {
  if (e.u <= e.v) return e;
  return Edge{e.v, e.u, e.mark_v, e.mark_u};
}

bool is_directed(const Edge& e) {
  return (e.mark_u == Mark::tail && e.mark_v == Mark::arrow) ||
         (e.mark_u == Mark::arrow && e.mark_v == Mark::tail);
}

}  // namespace

MixedGraph::MixedGraph(GraphKind kind, std::vector<std::string> vertices,
                       std::vector<Edge> edges)
    : kind_(kind), vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
    throw InputError("duplicate vertex id");
  for (auto& e : edges_) e = canonical(e);
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  build_index();
  validate();
}

MixedGraph MixedGraph::dag(std::vector<std::string> vertices,
                           const std::vector<std::pair<std::string, std::string>>& arcs) {
  std::vector<Edge> es;
  es.reserve(arcs.size());
  for (const auto& [p, c] : arcs) es.push_back(Edge{p, c, Mark::tail, Mark::arrow});
  return MixedGraph(GraphKind::dag, std::move(vertices), std::move(es));
}

void MixedGraph::build_index() {
  index_.clear();
  for (int i = 0; i < static_cast<int>(vertices_.size()); ++i) index_[vertices_[i]] = i;
  inc_.assign(vertices_.size(), {});
  dir_parents_.assign(vertices_.size(), {});
  dir_children_.assign(vertices_.size(), {});
  for (const auto& e : edges_) {
    auto iu = index_.find(e.u);
    auto iv = index_.find(e.v);
    if (iu == index_.end() || iv == index_.end())
      throw InputError("edge endpoint is not a vertex: " + e.u + " -- " + e.v);
    if (e.u == e.v) throw InputError("self loop at " + e.u);
    inc_[iu->second].push_back(HalfEdge{iv->second, e.mark_u, e.mark_v});
    inc_[iv->second].push_back(HalfEdge{iu->second, e.mark_v, e.mark_u});
    if (e.mark_u == Mark::tail && e.mark_v == Mark::arrow) {
      dir_children_[iu->second].push_back(iv->second);
      dir_parents_[iv->second].push_back(iu->second);
    } else if (e.mark_u == Mark::arrow && e.mark_v == Mark::tail) {
      dir_children_[iv->second].push_back(iu->second);
      dir_parents_[iu->second].push_back(iv->second);
    }
  }
}

void MixedGraph::validate() const {
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i - 1].u == edges_[i].u && edges_[i - 1].v == edges_[i].v)
      throw InputError("multiple edges between " + edges_[i].u + " and " + edges_[i].v);

  // Directed part must be acyclic for both kinds.
  const int n = static_cast<int>(vertices_.size());
  std::vector<int> indeg(n, 0);
  for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(dir_parents_[v].size());
  std::deque<int> q;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) q.push_back(v);
  int seen = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    ++seen;
    for (int c : dir_children_[v])
      if (--indeg[c] == 0) q.push_back(c);
  }
  if (seen != n) throw InputError("directed part contains a cycle");

  if (kind_ == GraphKind::dag) {
    for (const auto& e : edges_)
      if (!is_directed(e)) throw InputError("dag contains a non-directed edge");
    return;
  }

  // Ancestral checks for mags.
  for (const auto& e : edges_) {
    if (e.mark_u == Mark::arrow && e.mark_v == Mark::arrow) {
      auto de_u = descendants(e.u);
      if (de_u.count(e.v)) throw InputError("almost-directed cycle through " + e.u);
      auto de_v = descendants(e.v);
      if (de_v.count(e.u)) throw InputError("almost-directed cycle through " + e.v);
    } else if (e.mark_u == Mark::tail && e.mark_v == Mark::tail) {
      for (const auto* end : {&e.u, &e.v}) {
        for (const auto& he : inc_[index_.at(*end)])
          if (he.mark_from == Mark::arrow)
            throw InputError("undirected edge endpoint " + *end + " has an incoming arrowhead");
      }
    }
  }
}

bool MixedGraph::has_vertex(const std::string& v) const { return index_.count(v) > 0; }

int MixedGraph::index_of(const std::string& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw InputError("unknown vertex: " + v);
  return it->second;
}

bool MixedGraph::adjacent(const std::string& u, const std::string& v) const {
  return edge_between(u, v).has_value();
}

std::optional<Edge> MixedGraph::edge_between(const std::string& u, const std::string& v) const {
  int iu = index_of(u);
  int iv = index_of(v);
  for (const auto& he : inc_[iu])
    if (he.to == iv) return Edge{u, v, he.mark_from, he.mark_to};
  return std::nullopt;
}

Mark MixedGraph::mark_at(const std::string& at, const std::string& other) const {
  auto e = edge_between(at, other);
  if (!e) throw InputError("no edge between " + at + " and " + other);
  return e->mark_u;
}

std::set<std::string> MixedGraph::parents(const std::string& v) const {
  std::set<std::string> out;
  for (int p : dir_parents_[index_of(v)]) out.insert(vertices_[p]);
  return out;
}

std::set<std::string> MixedGraph::children(const std::string& v) const {
  std::set<std::string> out;
  for (int c : dir_children_[index_of(v)]) out.insert(vertices_[c]);
  return out;
}

std::set<std::string> MixedGraph::neighbors(const std::string& v) const {
  std::set<std::string> out;
  for (const auto& he : inc_[index_of(v)]) out.insert(vertices_[he.to]);
  return out;
}

int MixedGraph::degree(const std::string& v) const {
  return static_cast<int>(inc_[index_of(v)].size());
}

namespace {

std::set<std::string> closure(const MixedGraph& g, const std::set<std::string>& of,
                              const std::vector<std::vector<int>>& step,
                              const std::vector<std::string>& names,
                              const std::function<int(const std::string&)>& idx) {
  std::vector<char> seen(names.size(), 0);
  std::deque<int> q;
  for (const auto& v : of) {
    int i = idx(v);
    if (!seen[i]) {
      seen[i] = 1;
      q.push_back(i);
    }
  }
  (void)g;
  std::set<std::string> out;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    out.insert(names[v]);
    for (int w : step[v])
      if (!seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  return out;
}

}  // namespace

std::set<std::string> MixedGraph::ancestors(const std::set<std::string>& of) const {
  return closure(*this, of, dir_parents_, vertices_,
                 [this](const std::string& v) { return index_of(v); });
}

std::set<std::string> MixedGraph::descendants(const std::set<std::string>& of) const {
  return closure(*this, of, dir_children_, vertices_,
                 [this](const std::string& v) { return index_of(v); });
}

std::set<std::string> MixedGraph::ancestors(const std::string& of) const {
  return ancestors(std::set<std::string>{of});
}

std::set<std::string> MixedGraph::descendants(const std::string& of) const {
  return descendants(std::set<std::string>{of});
}

MixedGraph MixedGraph::induced(const std::set<std::string>& keep) const {
  std::vector<std::string> vs;
  for (const auto& v : keep) {
    if (!has_vertex(v)) throw InputError("unknown vertex: " + v);
    vs.push_back(v);
  }
  std::vector<Edge> es;
  for (const auto& e : edges_)
    if (keep.count(e.u) && keep.count(e.v)) es.push_back(e);
  return MixedGraph(kind_, std::move(vs), std::move(es));
}

void validate_spec(const MixedGraph& g, const ProblemSpec& spec) {
  if (!g.has_vertex(spec.target)) throw InputError("target is not a vertex: " + spec.target);
  std::set<std::string> all;
  for (const auto& v : spec.stable) {
    if (!g.has_vertex(v)) throw InputError("unknown stable vertex: " + v);
    all.insert(v);
  }
  for (const auto& v : spec.mutable_vars) {
    if (!g.has_vertex(v)) throw InputError("unknown mutable vertex: " + v);
    if (!all.insert(v).second) throw InputError("vertex in both stable and mutable: " + v);
  }
  if (all.count(spec.target)) throw InputError("target listed as stable or mutable");
  if (all.size() + 1 != g.vertex_count())
    throw InputError("stable and mutable must partition the non-target vertices");
}

bool is_path(const MixedGraph& g, const Path& p) {
  if (p.vertices.empty()) return false;
  std::set<std::string> seen;
  for (const auto& v : p.vertices) {
    if (!g.has_vertex(v)) return false;
    if (!seen.insert(v).second) return false;
  }
  for (std::size_t i = 1; i < p.vertices.size(); ++i)
    if (!g.adjacent(p.vertices[i - 1], p.vertices[i])) return false;
  return true;
}

MixedGraph mutilate(const MixedGraph& g, const std::set<std::string>& targets) {
  if (g.kind() != GraphKind::dag) throw InputError("mutilate requires a dag");
  for (const auto& v : targets)
    if (!g.has_vertex(v)) throw InputError("unknown vertex: " + v);
  std::vector<Edge> kept;
  for (const auto& e : g.edges()) {
    bool into_target = (e.mark_v == Mark::arrow && targets.count(e.v)) ||
                       (e.mark_u == Mark::arrow && targets.count(e.u));
    if (!into_target) kept.push_back(e);
  }
  return MixedGraph(GraphKind::dag, g.vertex_ids(), std::move(kept));
}

std::vector<std::string> topological_order(const MixedGraph& g) {
  if (g.kind() != GraphKind::dag) throw InputError("topological order requires a dag");
  const auto& names = g.vertex_ids();
  const int n = static_cast<int>(names.size());
  std::vector<int> indeg(n, 0);
  for (const auto& v : names) indeg[g.index_of(v)] = static_cast<int>(g.parents(v).size());
  std::set<int> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.insert(i);
  std::vector<std::string> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(names[v]);
    for (const auto& c : g.children(names[v])) {
      int ci = g.index_of(c);
      if (--indeg[ci] == 0) ready.insert(ci);
    }
  }
  return order;
}

bool is_separated(const MixedGraph& g, const std::set<std::string>& a,
                  const std::set<std::string>& b, const std::set<std::string>& z) {
  auto check_known = [&g](const std::set<std::string>& s) {
    for (const auto& v : s)
      if (!g.has_vertex(v)) throw InputError("unknown vertex: " + v);
  };
  check_known(a);
  check_known(b);
  check_known(z);
  for (const auto& v : a)
    if (b.count(v) || z.count(v)) throw InputError("separation sets overlap at " + v);
  for (const auto& v : b)
    if (z.count(v)) throw InputError("separation sets overlap at " + v);
  if (a.empty() || b.empty()) return true;

  const int n = static_cast<int>(g.vertices_.size());
  std::vector<char> in_z(n, 0), in_b(n, 0), anc_z(n, 0);
  for (const auto& v : z) in_z[g.index_of(v)] = 1;
  for (const auto& v : b) in_b[g.index_of(v)] = 1;
  {
    std::deque<int> q;
    for (const auto& v : z) {
      int i = g.index_of(v);
      if (!anc_z[i]) {
        anc_z[i] = 1;
        q.push_back(i);
      }
    }
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int p : g.dir_parents_[v])
        if (!anc_z[p]) {
          anc_z[p] = 1;
          q.push_back(p);
        }
    }
  }

  // Reachability over (vertex, arriving mark) states. Arriving mark matters
  // only through collider status at the vertex being left.
  std::vector<char> visited(2 * n, 0);
  std::deque<std::pair<int, Mark>> q;
  auto push = [&](int v, Mark m) {
    int s = 2 * v + (m == Mark::arrow ? 1 : 0);
    if (!visited[s]) {
      visited[s] = 1;
      q.emplace_back(v, m);
    }
  };
  for (const auto& av : a) {
    int ai = g.index_of(av);
    for (const auto& he : g.inc_[ai]) {
      if (in_b[he.to]) return false;
      push(he.to, he.mark_to);
    }
  }
  while (!q.empty()) {
    auto [v, m_in] = q.front();
    q.pop_front();
    for (const auto& he : g.inc_[v]) {
      bool collider = (m_in == Mark::arrow && he.mark_from == Mark::arrow);
      bool passable = collider ? anc_z[v] != 0 : in_z[v] == 0;
      if (!passable) continue;
      if (in_b[he.to]) return false;
      push(he.to, he.mark_to);
    }
  }
  return true;
}

}  // namespace stablesel
