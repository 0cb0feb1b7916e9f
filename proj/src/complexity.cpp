#include "stablesel/complexity.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <utility>

#include "stablesel/equivalence.hpp"
#include "stablesel/error.hpp"

namespace stablesel {

namespace {

using EdgePair = std::pair<std::string, std::string>;

EdgePair ordered(const std::string& a, const std::string& b) {
  return a < b ? EdgePair{a, b} : EdgePair{b, a};
}

MixedGraph skeleton_graph(const std::vector<std::string>& vertices,
                          const std::set<EdgePair>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [u, v] : pairs) edges.push_back({u, v, Mark::tail, Mark::tail});
  return MixedGraph(GraphKind::mag, vertices, edges);
}

MixedGraph to_skeleton(const MixedGraph& g) {
  std::set<EdgePair> pairs;
  for (const Edge& e : g.edges()) pairs.insert({e.u, e.v});
  return skeleton_graph(g.vertex_ids(), pairs);
}

// Hop distances from source; restricted to `allowed` vertices when given.
// Missing entries are unreachable.
std::map<std::string, int> bfs_dist(const MixedGraph& g, const std::string& source,
                                    const std::set<std::string>* allowed = nullptr) {
  std::map<std::string, int> dist;
  std::queue<std::string> fifo;
  dist[source] = 0;
  fifo.push(source);
  while (!fifo.empty()) {
    std::string v = fifo.front();
    fifo.pop();
    for (const std::string& w : g.neighbors(v)) {
      if (dist.count(w)) continue;
      if (allowed && !allowed->count(w)) continue;
      dist[w] = dist[v] + 1;
      fifo.push(w);
    }
  }
  return dist;
}

unsigned long long checked_mul(unsigned long long a, unsigned long long b) {
  if (a != 0 && b > std::numeric_limits<unsigned long long>::max() / a)
    throw CapError("projection count overflows 64 bits");
  return a * b;
}

unsigned long long checked_add(unsigned long long a, unsigned long long b) {
  if (b > std::numeric_limits<unsigned long long>::max() - a)
    throw CapError("projection count overflows 64 bits");
  return a + b;
}

// Connected runs of degree <= 2 vertices, as paths from the lexicographically
// smaller endpoint. Cycle components have no endpoint and are skipped.
std::vector<std::vector<std::string>> chain_components(const MixedGraph& g,
                                                       const std::string& target) {
  std::set<std::string> chain_verts;
  for (const std::string& v : g.vertex_ids())
    if (v != target && g.degree(v) <= 2) chain_verts.insert(v);
  std::vector<std::vector<std::string>> paths;
  std::set<std::string> seen;
  for (const std::string& start : chain_verts) {
    if (seen.count(start)) continue;
    std::set<std::string> comp;
    std::queue<std::string> fifo;
    seen.insert(start);
    fifo.push(start);
    while (!fifo.empty()) {
      std::string x = fifo.front();
      fifo.pop();
      comp.insert(x);
      for (const std::string& w : g.neighbors(x))
        if (chain_verts.count(w) && !seen.count(w)) {
          seen.insert(w);
          fifo.push(w);
        }
    }
    std::vector<std::string> ends;
    for (const std::string& x : comp) {
      int internal = 0;
      for (const std::string& w : g.neighbors(x)) internal += comp.count(w) ? 1 : 0;
      if (internal <= 1) ends.push_back(x);
    }
    if (ends.empty()) continue;
    std::sort(ends.begin(), ends.end());
    std::vector<std::string> path;
    std::string prev;
    std::string cur = ends.front();
    while (true) {
      path.push_back(cur);
      std::string next;
      for (const std::string& w : g.neighbors(cur))
        if (comp.count(w) && w != prev) {
          next = w;
          break;
        }
      if (next.empty() || (int)path.size() == (int)comp.size()) break;
      prev = cur;
      cur = next;
    }
    paths.push_back(path);
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

// Simple path from the target that crosses `mine` before touching `others`.
// Walk reachability is not enough: a revisit could fake the crossing.
bool has_through_path(const MixedGraph& g, const std::string& target,
                      const std::set<std::string>& mine,
                      const std::set<std::string>& others) {
  std::set<std::string> on_path{target};
  std::function<bool(const std::string&, bool)> dfs = [&](const std::string& v,
                                                          bool crossed) -> bool {
    for (const std::string& w : g.neighbors(v)) {
      if (on_path.count(w)) continue;
      bool next = crossed || mine.count(w) > 0;
      if (next && others.count(w)) return true;
      on_path.insert(w);
      bool hit = dfs(w, next);
      on_path.erase(w);
      if (hit) return true;
    }
    return false;
  };
  return dfs(target, false);
}

MixedGraph reduce_graph(const MixedGraph& g, const std::set<std::string>& removed,
                        const std::set<EdgePair>& extra) {
  std::vector<std::string> verts;
  for (const std::string& v : g.vertex_ids())
    if (!removed.count(v)) verts.push_back(v);
  std::set<EdgePair> pairs(extra);
  for (const Edge& e : g.edges())
    if (!removed.count(e.u) && !removed.count(e.v)) pairs.insert({e.u, e.v});
  return skeleton_graph(verts, pairs);
}

MixedGraph contract_into_target(const MixedGraph& g, const std::string& target,
                                const std::string& v) {
  std::vector<std::string> verts;
  for (const std::string& x : g.vertex_ids())
    if (x != v) verts.push_back(x);
  std::set<EdgePair> pairs;
  for (const Edge& e : g.edges()) {
    std::string a = e.u == v ? target : e.u;
    std::string b = e.v == v ? target : e.v;
    if (a == b) continue;
    pairs.insert(ordered(a, b));
  }
  return skeleton_graph(verts, pairs);
}

// The two vertices outside the chain that its endpoints attach to.
EdgePair splice_edge(const MixedGraph& g, const ChainSummary& c) {
  std::set<std::string> gone(c.vertices.begin(), c.vertices.end());
  std::set<std::string> attach;
  for (const std::string& end : {c.vertices.front(), c.vertices.back()})
    for (const std::string& w : g.neighbors(end))
      if (!gone.count(w)) attach.insert(w);
  if (attach.size() != 2)
    throw InvariantError("splice needs exactly two attachment points");
  auto it = attach.begin();
  const std::string& a = *it++;
  return ordered(a, *it);
}

unsigned long long f_rec(MixedGraph g, const std::string& target, long long& nodes,
                         long long cap) {
  if (++nodes > cap) throw CapError("chain recursion exceeds the node cap");
  while (true) {
    std::string pick;
    for (const std::string& v : g.neighbors(target))
      if (g.degree(v) >= 3) {
        pick = v;
        break;
      }
    if (pick.empty()) break;
    g = contract_into_target(g, target, pick);
  }
  Decomposition dec = decompose(g, target);
  std::vector<const ChainSummary*> choosers;
  std::set<std::string> forced;
  unsigned long long factor = 1;
  bool any = false;
  for (const ChainSummary& c : dec.chains) {
    if (!c.y_adjacent) continue;
    any = true;
    if (c.isolated) {
      factor = checked_mul(factor, c.cost);
      forced.insert(c.vertices.begin(), c.vertices.end());
    } else {
      choosers.push_back(&c);
    }
  }
  if (!any) return 1;
  // option k in [0, l) removes the k+1 nearest vertices, option l splices
  std::vector<int> option(choosers.size(), 0);
  unsigned long long sum = 0;
  while (true) {
    std::set<std::string> removed(forced);
    std::set<EdgePair> extra;
    for (size_t k = 0; k < choosers.size(); ++k) {
      const ChainSummary& c = *choosers[k];
      int l = (int)c.vertices.size();
      if (option[k] < l) {
        for (int j = 0; j <= option[k]; ++j) removed.insert(c.removal_order[j]);
      } else {
        removed.insert(c.vertices.begin(), c.vertices.end());
        extra.insert(splice_edge(g, c));
      }
    }
    sum = checked_add(sum, f_rec(reduce_graph(g, removed, extra), target, nodes, cap));
    size_t k = 0;
    for (; k < choosers.size(); ++k) {
      if (option[k] < (int)choosers[k]->vertices.size()) {
        ++option[k];
        break;
      }
      option[k] = 0;
    }
    if (k == choosers.size()) break;
  }
  return checked_mul(factor, sum);
}

bool is_forest(const MixedGraph& g) {
  int comps = 0;
  std::set<std::string> seen;
  for (const std::string& v : g.vertex_ids()) {
    if (seen.count(v)) continue;
    ++comps;
    std::queue<std::string> fifo;
    seen.insert(v);
    fifo.push(v);
    while (!fifo.empty()) {
      std::string x = fifo.front();
      fifo.pop();
      for (const std::string& w : g.neighbors(x))
        if (!seen.count(w)) {
          seen.insert(w);
          fifo.push(w);
        }
    }
  }
  return (int)g.edges().size() == (int)g.vertex_count() - comps;
}

// Closed form on forests: a chain hangs below the first other-chain vertex on
// its head's path to the target, and f(c) = len(c) + product of child values,
// where a childless chain contributes len(c) + 1.
unsigned long long tree_count(const MixedGraph& g, const std::string& target) {
  Decomposition dec = decompose(g, target);
  std::map<std::string, std::string> up;
  {
    std::set<std::string> seen{target};
    std::queue<std::string> fifo;
    fifo.push(target);
    while (!fifo.empty()) {
      std::string v = fifo.front();
      fifo.pop();
      for (const std::string& w : g.neighbors(v))
        if (!seen.count(w)) {
          seen.insert(w);
          up[w] = v;
          fifo.push(w);
        }
    }
  }
  std::map<std::string, int> owner;
  for (size_t i = 0; i < dec.chains.size(); ++i)
    for (const std::string& v : dec.chains[i].vertices) owner[v] = (int)i;
  int m = (int)dec.chains.size();
  std::vector<int> gate(m, -2);  // -2 outside the target's component, -1 root
  std::vector<std::vector<int>> children(m);
  for (int i = 0; i < m; ++i) {
    const ChainSummary& c = dec.chains[i];
    if (c.heads.empty()) continue;
    int gi = -1;
    for (std::string v = up.at(c.heads.front()); v != target; v = up.at(v)) {
      auto it = owner.find(v);
      if (it != owner.end() && it->second != i) {
        gi = it->second;
        break;
      }
    }
    gate[i] = gi;
    if (gi >= 0) children[gi].push_back(i);
  }
  std::function<unsigned long long(int)> fval = [&](int i) -> unsigned long long {
    unsigned long long len = dec.chains[i].vertices.size();
    if (children[i].empty()) return len + 1;
    unsigned long long prod = 1;
    for (int ch : children[i]) prod = checked_mul(prod, fval(ch));
    return checked_add(len, prod);
  };
  unsigned long long total = 1;
  for (int i = 0; i < m; ++i)
    if (gate[i] == -1) total = checked_mul(total, fval(i));
  return total;
}

LeafDiagnostics leaf_checks(const MixedGraph& skel, const std::string& target,
                            bool forest) {
  LeafDiagnostics d;
  for (const std::string& v : skel.vertex_ids()) {
    if (skel.degree(v) <= 1) ++d.leaf_count;
    if (v != target && skel.degree(v) >= 3) ++d.branch_count;
  }
  d.tree_lemma_applicable = forest && d.branch_count >= 1;
  if (d.tree_lemma_applicable) d.tree_lemma_holds = d.leaf_count >= d.branch_count + 2;
  std::map<std::string, int> kids;
  std::set<std::string> seen{target};
  std::queue<std::string> fifo;
  fifo.push(target);
  kids[target] = 0;
  while (!fifo.empty()) {
    std::string v = fifo.front();
    fifo.pop();
    for (const std::string& w : skel.neighbors(v))
      if (!seen.count(w)) {
        seen.insert(w);
        ++kids[v];
        kids[w] = 0;
        fifo.push(w);
      }
  }
  for (const auto& [v, k] : kids)
    if (k == 0) ++d.spanning_tree_leaves;
  d.spanning_check_ok = d.spanning_tree_leaves * 9 >= d.branch_count;
  return d;
}

MixedGraph stable_skeleton(const MixedGraph& g, const ProblemSpec& spec) {
  validate_spec(g, spec);
  std::set<std::string> keep(spec.stable.begin(), spec.stable.end());
  keep.insert(spec.target);
  return to_skeleton(g.induced(keep));
}

}  // namespace

Decomposition decompose(const MixedGraph& g, const std::string& target) {
  if (!g.has_vertex(target)) throw InputError("unknown target: " + target);
  Decomposition dec;
  for (const std::string& v : g.vertex_ids())
    if (v != target && g.degree(v) >= 3) dec.branch_vertices.insert(v);
  auto dist = bfs_dist(g, target);
  auto paths = chain_components(g, target);
  std::map<std::string, int> owner;
  for (size_t i = 0; i < paths.size(); ++i)
    for (const std::string& v : paths[i]) owner[v] = (int)i;
  for (size_t i = 0; i < paths.size(); ++i) {
    ChainSummary c;
    c.vertices = paths[i];
    int l = (int)c.vertices.size();
    const std::string& front = c.vertices.front();
    const std::string& back = c.vertices.back();
    if (dist.count(front)) {
      if (l == 1) {
        c.heads = {front};
      } else if (dist.at(front) == dist.at(back)) {
        c.heads = {front, back};
        c.two_headed = true;
      } else {
        c.heads = {dist.at(front) < dist.at(back) ? front : back};
      }
    }
    if (!c.heads.empty()) {
      // shortest route must survive deleting every other chain
      std::set<std::string> allowed;
      for (const std::string& v : g.vertex_ids()) {
        auto it = owner.find(v);
        if (it == owner.end() || it->second == (int)i) allowed.insert(v);
      }
      auto rdist = bfs_dist(g, target, &allowed);
      for (const std::string& h : c.heads)
        if (rdist.count(h) && rdist.at(h) == dist.at(h)) {
          c.y_adjacent = true;
          break;
        }
    }
    std::set<std::string> mine(c.vertices.begin(), c.vertices.end());
    std::set<std::string> others;
    for (const auto& [v, idx] : owner)
      if (idx != (int)i) others.insert(v);
    c.isolated = others.empty() || !has_through_path(g, target, mine, others);
    std::map<std::string, int> pos;
    for (int k = 0; k < l; ++k) pos[c.vertices[k]] = k;
    std::string ref = c.heads.empty()
                          ? front
                          : *std::min_element(c.heads.begin(), c.heads.end());
    bool from_front = ref == front;
    auto key = [&](const std::string& v) {
      int d = dist.count(v) ? dist.at(v) : std::numeric_limits<int>::max();
      int p = from_front ? pos[v] : l - 1 - pos[v];
      return std::pair<int, int>(d, p);
    };
    c.removal_order = c.vertices;
    std::sort(c.removal_order.begin(), c.removal_order.end(),
              [&](const std::string& a, const std::string& b) { return key(a) < key(b); });
    unsigned long long ll = (unsigned long long)l;
    c.cost = c.two_headed ? (ll * ll + ll + 2) / 2 : ll + 1;
    dec.chains.push_back(std::move(c));
  }
  return dec;
}

MixedGraph apply_opt(const MixedGraph& g, const std::string& target,
                     const ChainSummary& chain, const ChainOption& opt) {
  MixedGraph skel = to_skeleton(g);
  Decomposition dec = decompose(skel, target);
  std::set<std::string> want(chain.vertices.begin(), chain.vertices.end());
  const ChainSummary* cc = nullptr;
  for (const ChainSummary& c : dec.chains) {
    std::set<std::string> have(c.vertices.begin(), c.vertices.end());
    if (have == want) {
      cc = &c;
      break;
    }
  }
  if (!cc) throw InputError("no chain with the given vertices");
  if (!cc->y_adjacent) throw InputError("chain is not target-adjacent");
  int l = (int)cc->vertices.size();
  if (opt.splice) {
    if (cc->isolated) throw InputError("isolated chains admit only full removal");
  } else if (opt.remove < 1 || opt.remove > l) {
    throw InputError("removal count out of range");
  } else if (cc->isolated && opt.remove != l) {
    throw InputError("isolated chains admit only full removal");
  }
  std::set<std::string> removed;
  std::set<EdgePair> extra;
  if (opt.splice) {
    removed.insert(cc->vertices.begin(), cc->vertices.end());
    extra.insert(splice_edge(skel, *cc));
  } else {
    for (int k = 0; k < opt.remove; ++k) removed.insert(cc->removal_order[k]);
  }
  return reduce_graph(skel, removed, extra);
}

ComplexityReport compute_f(const MixedGraph& g, const ProblemSpec& spec,
                           long long cap_nodes) {
  if (cap_nodes < 1) throw InputError("cap_nodes must be positive");
  MixedGraph skel = stable_skeleton(g, spec);
  ComplexityReport rep;
  Decomposition dec = decompose(skel, spec.target);
  rep.chains = dec.chains;
  rep.d_ge3 = (int)dec.branch_vertices.size();
  rep.d_le2 = (int)skel.vertex_count() - rep.d_ge3 - 1;
  rep.is_tree = is_forest(skel);
  rep.f = f_rec(skel, spec.target, rep.nodes, cap_nodes);
  if (rep.is_tree && tree_count(skel, spec.target) != rep.f)
    throw InvariantError("tree recursion disagrees with the chain count");
  rep.leaves = leaf_checks(skel, spec.target, rep.is_tree);
  return rep;
}

ComplexityReport certify_bounds(const MixedGraph& g, const ProblemSpec& spec,
                                int class_guard, long long cap_nodes) {
  ComplexityReport rep = compute_f(g, spec, cap_nodes);
  if ((int)spec.stable.size() > class_guard) return rep;
  rep.n = (unsigned long long)recover_classes(g, spec).classes.size();
  unsigned long long upper = rep.f;
  for (int k = 0; k < rep.d_ge3; ++k) upper = checked_mul(upper, 2ull);
  rep.bound_verdict = rep.f <= *rep.n && *rep.n <= upper ? "holds" : "violated";
  return rep;
}

LeafDiagnostics structural_lemma_checks(const MixedGraph& g, const ProblemSpec& spec) {
  MixedGraph skel = stable_skeleton(g, spec);
  return leaf_checks(skel, spec.target, is_forest(skel));
}

}  // namespace stablesel
