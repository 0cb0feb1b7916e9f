#include "stablesel/equivalence.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "stablesel/error.hpp"
#include "stablesel/mag.hpp"

namespace stablesel {

unsigned long long EquivalenceClass::size() const {
  if (free.size() > 62) throw CapError("class size exceeds 2^62");
  return 1ull << free.size();
}

std::vector<std::set<std::string>> EquivalenceClass::members() const {
  if (free.size() > 20) throw CapError("too many class members to enumerate");
  std::vector<std::string> fr(free.begin(), free.end());
  std::vector<std::set<std::string>> out;
  out.reserve(1u << fr.size());
  for (std::uint32_t mask = 0; mask < (1u << fr.size()); ++mask) {
    std::set<std::string> m = representative;
    for (std::size_t i = 0; i < fr.size(); ++i)
      if (mask & (1u << i)) m.insert(fr[i]);
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

MixedGraph stable_subgraph(const MixedGraph& g, const ProblemSpec& spec) {
  std::set<std::string> keep = spec.stable;
  keep.insert(spec.target);
  return g.induced(keep);
}

void check_subset_of_stable(const std::set<std::string>& s,
                            const std::set<std::string>& stable) {
  for (const auto& v : s)
    if (!stable.count(v)) throw InputError("subset member is not stable: " + v);
}

std::set<std::string> from_mask(const std::vector<std::string>& elems, std::uint64_t mask) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < elems.size(); ++i)
    if (mask & (1ull << i)) out.insert(elems[i]);
  return out;
}

// Shared by the pairwise test and the brute-force partition: does some
// subset of `inter_mask` separate the target from the rest of `union_mask`?
// `query` answers one separation question keyed by (rest mask, cond mask).
template <typename Query>
bool equivalent_by_masks(std::uint64_t inter_mask, std::uint64_t union_mask, Query&& query) {
  std::uint64_t sub = inter_mask;
  while (true) {
    if (query(union_mask & ~sub, sub)) return true;
    if (sub == 0) break;
    sub = (sub - 1) & inter_mask;
  }
  return false;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct RecState {
  long long nodes = 0;
  std::vector<EquivalenceClass> classes;
};

void recover_rec(const MixedGraph& g, const std::string& target, std::set<std::string> rep,
                 RecState& st) {
  ++st.nodes;
  auto neig = g.neighbors(target);
  if (neig.empty()) {
    std::set<std::string> free;
    for (const auto& v : g.vertex_ids())
      if (v != target) free.insert(v);
    st.classes.push_back(EquivalenceClass{std::move(rep), std::move(free)});
    return;
  }
  if (neig.size() > 62) throw CapError("too many target neighbors to branch on");
  std::vector<std::string> nb(neig.begin(), neig.end());
  std::set<std::string> rest;
  for (const auto& v : g.vertex_ids())
    if (v != target && !neig.count(v)) rest.insert(v);
  for (std::uint64_t mask = 0; mask < (1ull << nb.size()); ++mask) {
    Projection proj;
    proj.observed = rest;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (mask & (1ull << i))
        proj.selection.insert(nb[i]);
      else
        proj.latent.insert(nb[i]);
    }
    std::set<std::string> child_rep = rep;
    child_rep.insert(proj.selection.begin(), proj.selection.end());
    recover_rec(build_mag(g, target, proj), target, std::move(child_rep), st);
  }
}

void sort_and_check(std::vector<EquivalenceClass>& classes, std::size_t d_stable) {
  std::sort(classes.begin(), classes.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) {
              return a.representative < b.representative;
            });
  for (std::size_t i = 1; i < classes.size(); ++i)
    if (classes[i - 1].representative == classes[i].representative)
      throw InvariantError("duplicate class representative");
  if (d_stable <= 62) {
    unsigned long long total = 0;
    for (const auto& c : classes) total += c.size();
    if (total != (1ull << d_stable))
      throw InvariantError("class sizes do not cover the subset lattice");
  }
}

}  // namespace

bool are_equivalent(const MixedGraph& g, const ProblemSpec& spec,
                    const std::set<std::string>& s1, const std::set<std::string>& s2) {
  validate_spec(g, spec);
  check_subset_of_stable(s1, spec.stable);
  check_subset_of_stable(s2, spec.stable);
  MixedGraph gs = stable_subgraph(g, spec);

  std::vector<std::string> uni;
  std::set_union(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(uni));
  if (uni.size() > 62) throw CapError("subsets too large to test");
  std::uint64_t union_mask = (1ull << uni.size()) - 1;
  std::uint64_t inter_mask = 0;
  for (std::size_t i = 0; i < uni.size(); ++i)
    if (s1.count(uni[i]) && s2.count(uni[i])) inter_mask |= 1ull << i;

  return equivalent_by_masks(inter_mask, union_mask,
                             [&](std::uint64_t rest, std::uint64_t cond) {
                               return is_separated(gs, {spec.target}, from_mask(uni, rest),
                                                   from_mask(uni, cond));
                             });
}

Partition recover_classes(const MixedGraph& g, const ProblemSpec& spec) {
  validate_spec(g, spec);
  MixedGraph gs = stable_subgraph(g, spec);
  RecState st;
  recover_rec(gs, spec.target, {}, st);
  sort_and_check(st.classes, spec.stable.size());
  if (st.nodes > 2 * static_cast<long long>(st.classes.size()))
    throw InvariantError("recursion node count exceeds twice the class count");
  return Partition{std::move(st.classes), st.nodes};
}

Partition brute_force_partition(const MixedGraph& g, const ProblemSpec& spec, int cap) {
  validate_spec(g, spec);
  const int d = static_cast<int>(spec.stable.size());
  if (d > cap) throw CapError("brute force is capped at " + std::to_string(cap) +
                              " stable variables");
  MixedGraph gs = stable_subgraph(g, spec);
  std::vector<std::string> elems(spec.stable.begin(), spec.stable.end());
  const std::uint32_t n_sub = 1u << d;

  std::vector<signed char> sep_memo(static_cast<std::size_t>(n_sub) * n_sub, -1);
  auto query = [&](std::uint64_t rest, std::uint64_t cond) {
    std::size_t key = static_cast<std::size_t>(rest) * n_sub + static_cast<std::size_t>(cond);
    if (sep_memo[key] < 0)
      sep_memo[key] = is_separated(gs, {spec.target}, from_mask(elems, rest),
                                   from_mask(elems, cond))
                          ? 1
                          : 0;
    return sep_memo[key] == 1;
  };

  std::vector<char> eq(static_cast<std::size_t>(n_sub) * n_sub, 0);
  UnionFind uf(static_cast<int>(n_sub));
  for (std::uint32_t i = 0; i < n_sub; ++i) {
    for (std::uint32_t j = i; j < n_sub; ++j) {
      bool e = equivalent_by_masks(i & j, i | j, query);
      eq[static_cast<std::size_t>(i) * n_sub + j] = e ? 1 : 0;
      eq[static_cast<std::size_t>(j) * n_sub + i] = e ? 1 : 0;
      if (e) uf.unite(static_cast<int>(i), static_cast<int>(j));
    }
  }
  for (std::uint32_t i = 0; i < n_sub; ++i)
    for (std::uint32_t j = 0; j < n_sub; ++j) {
      bool same = uf.find(static_cast<int>(i)) == uf.find(static_cast<int>(j));
      if (same != (eq[static_cast<std::size_t>(i) * n_sub + j] == 1))
        throw InvariantError("pairwise equivalence is not transitive");
    }

  std::vector<std::vector<std::uint32_t>> groups(n_sub);
  for (std::uint32_t i = 0; i < n_sub; ++i)
    groups[static_cast<std::uint32_t>(uf.find(static_cast<int>(i)))].push_back(i);

  Partition out;
  for (const auto& grp : groups) {
    if (grp.empty()) continue;
    std::uint32_t rep_mask = ~0u, union_all = 0;
    for (std::uint32_t m : grp) {
      rep_mask &= m;
      union_all |= m;
    }
    if (std::find(grp.begin(), grp.end(), rep_mask) == grp.end())
      throw InvariantError("class has no inclusion-minimal member");
    std::uint32_t free_mask = union_all & ~rep_mask;
    auto popcount = [](std::uint32_t m) {
      int c = 0;
      for (; m; m &= m - 1) ++c;
      return c;
    };
    if (grp.size() != (1ull << popcount(free_mask)))
      throw InvariantError("class is not shaped like a subset lattice");
    out.classes.push_back(
        EquivalenceClass{from_mask(elems, rep_mask), from_mask(elems, free_mask)});
  }
  sort_and_check(out.classes, spec.stable.size());
  return out;
}

const EquivalenceClass& class_of(const Partition& p, const std::set<std::string>& s,
                                 const std::set<std::string>& stable) {
  check_subset_of_stable(s, stable);
  const EquivalenceClass* hit = nullptr;
  for (const auto& c : p.classes) {
    if (!std::includes(s.begin(), s.end(), c.representative.begin(), c.representative.end()))
      continue;
    bool inside = true;
    for (const auto& v : s)
      if (!c.representative.count(v) && !c.free.count(v)) {
        inside = false;
        break;
      }
    if (!inside) continue;
    if (hit) throw InvariantError("subset contained in two classes");
    hit = &c;
  }
  if (!hit) throw InvariantError("subset not contained in any class");
  return *hit;
}

}  // namespace stablesel
