#include "stablesel/mag.hpp"

#include <algorithm>
#include <vector>

#include "stablesel/error.hpp"

namespace stablesel {

std::set<std::string> anterior(const MixedGraph& g, const std::set<std::string>& base) {
  std::set<std::string> out;
  std::vector<std::string> stack;
  for (const auto& v : base) {
    if (!g.has_vertex(v)) throw InputError("unknown vertex: " + v);
    if (out.insert(v).second) stack.push_back(v);
  }
  while (!stack.empty()) {
    std::string w = stack.back();
    stack.pop_back();
    for (const auto& u : g.neighbors(w)) {
      if (out.count(u)) continue;
      // A tail at u means u -> w or u -- w, either of which makes u anterior.
      if (g.mark_at(u, w) == Mark::tail) {
        out.insert(u);
        stack.push_back(u);
      }
    }
  }
  return out;
}

namespace {

// DFS over simple paths; ok(prev_mark_into_v, v, mark_out_of_v) gates interior
// vertices. Walks are not enough here: a vertex may be passable as a collider
// but not as a non-collider, so revisits along one path would change status.
bool dfs_inducing(const MixedGraph& g, int v, Mark m_in, int target,
                  const std::vector<std::vector<int>>& adj_idx,
                  const std::vector<std::vector<std::pair<Mark, Mark>>>& adj_marks,
                  const std::vector<char>& interior_ok_collider,
                  const std::vector<char>& interior_ok_noncollider,
                  std::vector<char>& on_path) {
  for (std::size_t k = 0; k < adj_idx[v].size(); ++k) {
    int w = adj_idx[v][k];
    Mark m_from = adj_marks[v][k].first;
    Mark m_to = adj_marks[v][k].second;
    bool collider = (m_in == Mark::arrow && m_from == Mark::arrow);
    if (collider ? !interior_ok_collider[v] : !interior_ok_noncollider[v]) continue;
    if (w == target) return true;
    if (on_path[w]) continue;
    on_path[w] = 1;
    if (dfs_inducing(g, w, m_to, target, adj_idx, adj_marks, interior_ok_collider,
                     interior_ok_noncollider, on_path))
      return true;
    on_path[w] = 0;
  }
  return false;
}

}  // namespace

bool has_inducing_path(const MixedGraph& g, const std::string& a, const std::string& b,
                       const std::set<std::string>& selection,
                       const std::set<std::string>& latent) {
  if (a == b) throw InputError("inducing path endpoints must differ");
  for (const auto& v : {a, b})
    if (!g.has_vertex(v)) throw InputError("unknown vertex: " + v);
  for (const auto& v : selection)
    if (!g.has_vertex(v)) throw InputError("unknown vertex: " + v);
  for (const auto& v : latent)
    if (!g.has_vertex(v)) throw InputError("unknown vertex: " + v);

  std::set<std::string> ant_base = selection;
  ant_base.insert(a);
  ant_base.insert(b);
  auto ant = anterior(g, ant_base);

  const auto& names = g.vertex_ids();
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> adj_idx(n);
  std::vector<std::vector<std::pair<Mark, Mark>>> adj_marks(n);
  for (const auto& e : g.edges()) {
    int iu = g.index_of(e.u);
    int iv = g.index_of(e.v);
    adj_idx[iu].push_back(iv);
    adj_marks[iu].emplace_back(e.mark_u, e.mark_v);
    adj_idx[iv].push_back(iu);
    adj_marks[iv].emplace_back(e.mark_v, e.mark_u);
  }
  std::vector<char> ok_col(n, 0), ok_non(n, 0);
  for (int i = 0; i < n; ++i) {
    ok_col[i] = ant.count(names[i]) ? 1 : 0;
    ok_non[i] = latent.count(names[i]) ? 1 : 0;
  }

  int ia = g.index_of(a);
  int ib = g.index_of(b);
  std::vector<char> on_path(n, 0);
  on_path[ia] = 1;
  for (std::size_t k = 0; k < adj_idx[ia].size(); ++k) {
    int w = adj_idx[ia][k];
    if (w == ib) return true;
    on_path[w] = 1;
    if (dfs_inducing(g, w, adj_marks[ia][k].second, ib, adj_idx, adj_marks, ok_col, ok_non,
                     on_path))
      return true;
    on_path[w] = 0;
  }
  return false;
}

MixedGraph build_mag(const MixedGraph& source, const std::string& target,
                     const Projection& proj) {
  if (!source.has_vertex(target)) throw InputError("target is not a vertex: " + target);
  std::set<std::string> all;
  auto add_part = [&](const std::set<std::string>& part, const char* label) {
    for (const auto& v : part) {
      if (!source.has_vertex(v)) throw InputError(std::string("unknown ") + label + " vertex: " + v);
      if (v == target) throw InputError("target listed in the projection split");
      if (!all.insert(v).second) throw InputError("vertex in two projection parts: " + v);
    }
  };
  add_part(proj.observed, "observed");
  add_part(proj.latent, "latent");
  add_part(proj.selection, "selection");
  if (all.size() + 1 != source.vertex_count())
    throw InputError("projection parts must partition the non-target vertices");

  std::vector<std::string> keep(proj.observed.begin(), proj.observed.end());
  keep.push_back(target);
  std::sort(keep.begin(), keep.end());

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = i + 1; j < keep.size(); ++j) {
      const std::string& u = keep[i];
      const std::string& v = keep[j];
      if (!has_inducing_path(source, u, v, proj.selection, proj.latent)) continue;
      std::set<std::string> base_u = proj.selection;
      base_u.insert(v);
      std::set<std::string> base_v = proj.selection;
      base_v.insert(u);
      Mark mu = anterior(source, base_u).count(u) ? Mark::tail : Mark::arrow;
      Mark mv = anterior(source, base_v).count(v) ? Mark::tail : Mark::arrow;
      edges.push_back(Edge{u, v, mu, mv});
    }
  }
  return MixedGraph(GraphKind::mag, std::move(keep), std::move(edges));
}

}  // namespace stablesel
