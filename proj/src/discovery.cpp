#include "stablesel/discovery.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <istream>

#include <boost/math/distributions/chi_squared.hpp>

#include "stablesel/error.hpp"

namespace stablesel {

namespace {

// Visits subsets of {0..n-1} in increasing size, lexicographic within one
// size; stops as soon as visit returns true.
bool search_subsets(int n, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> idx;
  if (visit(idx)) return true;
  for (int k = 1; k <= n; ++k) {
    idx.resize(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (visit(idx)) return true;
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return false;
}

std::vector<std::string> non_marker_variables(const CiOracle& oracle) {
  std::vector<std::string> v;
  for (const auto& name : oracle.variables())
    if (name != oracle.env_marker()) v.push_back(name);
  std::sort(v.begin(), v.end());
  return v;
}

std::pair<std::string, std::string> ordered_pair(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

AugmentedGraph::AugmentedGraph(MixedGraph graph_in, std::string env_vertex_in)
    : graph(std::move(graph_in)), env_vertex(std::move(env_vertex_in)) {
  if (graph.kind() != GraphKind::dag) throw InputError("augmented graph must be a dag");
  if (!graph.has_vertex(env_vertex))
    throw InputError("environment vertex is not in the graph: " + env_vertex);
  if (!graph.parents(env_vertex).empty())
    throw InputError("environment vertex must be a root");
}

AugmentedGraph augment(const MixedGraph& g, const ProblemSpec& spec,
                       const std::string& env_name) {
  if (g.kind() != GraphKind::dag) throw InputError("augment requires a dag");
  validate_spec(g, spec);
  if (g.has_vertex(env_name))
    throw InputError("environment name collides with a vertex: " + env_name);
  std::vector<std::string> vertices = g.vertex_ids();
  vertices.push_back(env_name);
  std::vector<Edge> edges = g.edges();
  for (const auto& m : spec.mutable_vars) {
    Edge e{env_name, m, Mark::tail, Mark::arrow};
    if (m < env_name) e = Edge{m, env_name, Mark::arrow, Mark::tail};
    edges.push_back(e);
  }
  return AugmentedGraph(MixedGraph(GraphKind::dag, std::move(vertices), std::move(edges)),
                        env_name);
}

GraphCiOracle::GraphCiOracle(AugmentedGraph aug) : aug_(std::move(aug)) {}

const std::vector<std::string>& GraphCiOracle::variables() const {
  return aug_.graph.vertex_ids();
}

const std::string& GraphCiOracle::env_marker() const { return aug_.env_vertex; }

bool GraphCiOracle::independent(const std::string& a, const std::string& b,
                                const std::set<std::string>& z) {
  ++queries_;
  return is_separated(aug_.graph, {a}, {b}, z);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    s.erase(0, i);
  }
  return out;
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtol(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

}  // namespace

GTestCiOracle::GTestCiOracle(std::vector<std::string> names, std::vector<std::vector<int>> rows,
                             std::string env_marker, double alpha)
    : env_marker_(std::move(env_marker)), alpha_(alpha) {
  if (names.empty()) throw InputError("no variables");
  if (alpha <= 0.0 || alpha >= 1.0) throw InputError("alpha must be inside (0, 1)");
  std::vector<std::size_t> perm(names.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
  for (std::size_t i = 0; i < perm.size(); ++i) names_.push_back(names[perm[i]]);
  if (std::adjacent_find(names_.begin(), names_.end()) != names_.end())
    throw InputError("duplicate variable name");
  if (!std::binary_search(names_.begin(), names_.end(), env_marker_))
    throw InputError("environment column not found: " + env_marker_);
  if (rows.empty()) throw InputError("no data rows");

  n_rows_ = rows.size();
  cols_.assign(names_.size(), std::vector<int>(n_rows_, 0));
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (rows[r].size() != names.size()) throw InputError("ragged data row");
    for (std::size_t c = 0; c < names_.size(); ++c) cols_[c][r] = rows[r][perm[c]];
  }
  for (auto& col : cols_) {
    std::vector<int> levels = col;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (auto& x : col)
      x = static_cast<int>(std::lower_bound(levels.begin(), levels.end(), x) - levels.begin());
    card_.push_back(static_cast<int>(levels.size()));
  }
}

GTestCiOracle GTestCiOracle::from_csv(std::istream& in, const std::string& env_column,
                                      double alpha) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    header = split_csv_line(line);
    if (header.size() > 1 || (header.size() == 1 && !header[0].empty())) break;
    header.clear();
  }
  if (header.empty()) throw InputError("missing csv header");
  std::size_t env_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == env_column) env_col = i;
  if (env_col == header.size())
    throw InputError("environment column not found: " + env_column);

  std::vector<std::vector<int>> rows;
  std::vector<std::string> env_cells;
  while (std::getline(in, line)) {
    auto cells = split_csv_line(line);
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (cells.size() != header.size()) throw InputError("ragged csv row");
    std::vector<int> row(header.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == env_col) continue;
      long v = 0;
      if (!parse_int(cells[i], v))
        throw InputError("non-integer value in column " + header[i] + ": " + cells[i]);
      row[i] = static_cast<int>(v);
    }
    env_cells.push_back(cells[env_col]);
    rows.push_back(std::move(row));
  }

  bool all_int = true;
  std::vector<long> env_ints(env_cells.size(), 0);
  for (std::size_t i = 0; i < env_cells.size(); ++i)
    if (!parse_int(env_cells[i], env_ints[i])) {
      all_int = false;
      break;
    }
  if (all_int) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      rows[i][env_col] = static_cast<int>(env_ints[i]);
  } else {
    std::vector<std::string> levels = env_cells;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (std::size_t i = 0; i < rows.size(); ++i)
      rows[i][env_col] = static_cast<int>(
          std::lower_bound(levels.begin(), levels.end(), env_cells[i]) - levels.begin());
  }
  return GTestCiOracle(header, std::move(rows), env_column, alpha);
}

const std::vector<std::string>& GTestCiOracle::variables() const { return names_; }

const std::string& GTestCiOracle::env_marker() const { return env_marker_; }

int GTestCiOracle::col_of(const std::string& v) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), v);
  if (it == names_.end() || *it != v) throw InputError("unknown variable: " + v);
  return static_cast<int>(it - names_.begin());
}

bool GTestCiOracle::independent(const std::string& a, const std::string& b,
                                const std::set<std::string>& z) {
  ++queries_;
  if (a == b) throw InputError("independence query of a variable with itself");
  if (z.count(a) || z.count(b)) throw InputError("conditioning set overlaps the tested pair");
  const int ca = col_of(a);
  const int cb = col_of(b);
  std::vector<int> zc;
  for (const auto& v : z) zc.push_back(col_of(v));
  const int da = card_[ca];
  const int db = card_[cb];

  std::map<std::vector<int>, std::vector<long long>> groups;
  std::vector<int> key(zc.size(), 0);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (std::size_t i = 0; i < zc.size(); ++i) key[i] = cols_[zc[i]][r];
    auto& tab = groups[key];
    if (tab.empty()) tab.assign(static_cast<std::size_t>(da) * db, 0);
    ++tab[static_cast<std::size_t>(cols_[ca][r]) * db + cols_[cb][r]];
  }
  const long long dof =
      static_cast<long long>(da - 1) * (db - 1) * static_cast<long long>(groups.size());
  if (dof <= 0) return true;

  double g = 0.0;
  for (const auto& [zkey, tab] : groups) {
    (void)zkey;
    std::vector<long long> rmarg(da, 0), cmarg(db, 0);
    long long nz = 0;
    for (int x = 0; x < da; ++x)
      for (int y = 0; y < db; ++y) {
        const long long c = tab[static_cast<std::size_t>(x) * db + y];
        rmarg[x] += c;
        cmarg[y] += c;
        nz += c;
      }
    for (int x = 0; x < da; ++x)
      for (int y = 0; y < db; ++y) {
        const long long c = tab[static_cast<std::size_t>(x) * db + y];
        if (c > 0)
          g += 2.0 * static_cast<double>(c) *
               std::log(static_cast<double>(c) * static_cast<double>(nz) /
                        (static_cast<double>(rmarg[x]) * static_cast<double>(cmarg[y])));
      }
  }
  if (g < 0) g = 0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  const double p = boost::math::cdf(boost::math::complement(dist, g));
  return p > alpha_;
}

bool GraphOrientationOracle::orients_toward(const std::string& from, const std::string& to) {
  auto e = g_->edge_between(from, to);
  if (!e) throw InputError("no edge between " + from + " and " + to);
  return g_->children(from).count(to) > 0;
}

MutableScan find_mutable(CiOracle& oracle) {
  MutableScan out;
  const auto vars = non_marker_variables(oracle);
  const std::string& marker = oracle.env_marker();
  for (const auto& v : vars) {
    std::vector<std::string> cand;
    for (const auto& u : vars)
      if (u != v) cand.push_back(u);
    std::set<std::string> found;
    const bool separable =
        search_subsets(static_cast<int>(cand.size()), [&](const std::vector<int>& idx) {
          std::set<std::string> zset;
          for (int i : idx) zset.insert(cand[i]);
          if (!oracle.independent(v, marker, zset)) return false;
          found = std::move(zset);
          return true;
        });
    if (separable)
      out.registry[v] = std::move(found);
    else
      out.mutable_vars.insert(v);
  }
  return out;
}

bool Skeleton::adjacent(const std::string& u, const std::string& v) const {
  return std::find(edges.begin(), edges.end(), ordered_pair(u, v)) != edges.end();
}

std::set<std::string> Skeleton::neighbors(const std::string& v) const {
  std::set<std::string> out;
  for (const auto& [a, b] : edges) {
    if (a == v) out.insert(b);
    if (b == v) out.insert(a);
  }
  return out;
}

Skeleton find_skeleton(CiOracle& oracle) {
  Skeleton out;
  const auto vars = non_marker_variables(oracle);
  const std::string& marker = oracle.env_marker();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      std::vector<std::string> cand;
      for (const auto& u : vars)
        if (u != vars[i] && u != vars[j]) cand.push_back(u);
      cand.push_back(marker);
      std::sort(cand.begin(), cand.end());
      std::set<std::string> found;
      const bool separable =
          search_subsets(static_cast<int>(cand.size()), [&](const std::vector<int>& idx) {
            std::set<std::string> zset;
            for (int k : idx) zset.insert(cand[k]);
            if (!oracle.independent(vars[i], vars[j], zset)) return false;
            found = std::move(zset);
            return true;
          });
      if (separable)
        out.separators[{vars[i], vars[j]}] = std::move(found);
      else
        out.edges.emplace_back(vars[i], vars[j]);
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::set<std::string> detect_xm0(CiOracle& oracle, const std::string& target,
                                 const std::set<std::string>& mutable_vars,
                                 const std::map<std::string, std::set<std::string>>& registry,
                                 const Skeleton& skeleton) {
  if (mutable_vars.count(target)) throw InputError("target cannot be mutable");
  std::set<std::string> xm0;
  const std::string& marker = oracle.env_marker();
  auto reg = registry.find(target);
  for (const auto& m : mutable_vars) {
    if (!skeleton.adjacent(m, target)) continue;
    if (reg == registry.end())
      throw InputError("missing separating-set registry entry for " + target);
    std::set<std::string> z = reg->second;
    z.insert(m);
    if (!oracle.independent(target, marker, z)) xm0.insert(m);
  }
  return xm0;
}

std::set<std::string> recover_descendant_closure(
    CiOracle& oracle, const std::string& target, const std::set<std::string>& xm0,
    const std::set<std::string>& mutable_vars,
    const std::map<std::string, std::set<std::string>>& registry, const Skeleton& skeleton) {
  const std::string& marker = oracle.env_marker();
  std::set<std::string> closure = xm0;
  std::deque<std::string> queue(xm0.begin(), xm0.end());
  while (!queue.empty()) {
    const std::string xi = queue.front();
    queue.pop_front();
    for (const auto& xj : skeleton.neighbors(xi)) {
      if (closure.count(xj) || xj == target) continue;
      bool add = false;
      if (mutable_vars.count(xj)) {
        if (skeleton.adjacent(xj, target)) continue;
        auto sep = skeleton.separators.find(ordered_pair(xj, target));
        if (sep == skeleton.separators.end())
          throw InputError("missing separating-set registry entry for " + xj + " and " +
                           target);
        std::set<std::string> z = sep->second;
        z.insert(xi);
        add = oracle.independent(xj, target, z);
      } else {
        auto reg = registry.find(xj);
        if (reg == registry.end())
          throw InputError("missing separating-set registry entry for " + xj);
        std::set<std::string> z = reg->second;
        z.insert(xi);
        add = oracle.independent(xj, marker, z);
      }
      if (add) {
        closure.insert(xj);
        queue.push_back(xj);
      }
    }
  }
  return closure;
}

Orientations recover_orientations(CiOracle& oracle, OrientationOracle& orient,
                                  const std::string& target,
                                  const std::set<std::string>& mutable_vars,
                                  const std::map<std::string, std::set<std::string>>& registry,
                                  const Skeleton& skeleton) {
  Orientations out;
  const std::string& marker = oracle.env_marker();
  auto orient_edge = [&](const std::string& from, const std::string& to) {
    if (out.edges.count({to, from}))
      throw InvariantError("conflicting orientation between " + from + " and " + to);
    out.edges.insert({from, to});
  };
  for (const auto& xi : mutable_vars) {
    std::set<std::string> d{xi};
    std::deque<std::string> queue{xi};
    while (!queue.empty()) {
      const std::string xk = queue.front();
      queue.pop_front();
      for (const auto& xj : skeleton.neighbors(xk)) {
        if (d.count(xj)) continue;
        bool toward_xj = false;
        if (mutable_vars.count(xj)) {
          toward_xj = orient.orients_toward(xk, xj);
        } else {
          auto reg = registry.find(xj);
          if (reg == registry.end())
            throw InputError("missing separating-set registry entry for " + xj);
          std::set<std::string> z = reg->second;
          z.insert(xk);
          toward_xj = oracle.independent(xj, marker, z);
        }
        if (toward_xj) {
          orient_edge(xk, xj);
          d.insert(xj);
          queue.push_back(xj);
        } else {
          orient_edge(xj, xk);
        }
      }
    }
    d.erase(xi);
    out.descendants[xi] = std::move(d);
  }
  for (const auto& xi : mutable_vars) {
    std::set<std::string> pa;
    for (const auto& n : skeleton.neighbors(xi))
      if (out.edges.count({n, xi})) pa.insert(n);
    out.parents[xi] = std::move(pa);
  }
  (void)target;
  return out;
}

DiscoveryResult run_discovery(CiOracle& oracle, const std::string& target,
                              OrientationOracle* orient) {
  DiscoveryResult out;
  out.vars = non_marker_variables(oracle);
  if (!std::binary_search(out.vars.begin(), out.vars.end(), target))
    throw InputError("unknown target: " + target);
  out.target = target;

  MutableScan scan = find_mutable(oracle);
  out.mutable_vars = std::move(scan.mutable_vars);
  out.registry = std::move(scan.registry);
  Skeleton skeleton = find_skeleton(oracle);
  out.skeleton = skeleton.edges;
  out.xm0 = detect_xm0(oracle, target, out.mutable_vars, out.registry, skeleton);
  out.closure = recover_descendant_closure(oracle, target, out.xm0, out.mutable_vars,
                                           out.registry, skeleton);
  for (const auto& v : out.closure)
    if (!out.xm0.count(v)) out.w.insert(v);
  out.condition_holds = true;
  for (const auto& v : out.w)
    if (skeleton.adjacent(v, target)) out.condition_holds = false;
  if (orient) {
    Orientations o =
        recover_orientations(oracle, *orient, target, out.mutable_vars, out.registry, skeleton);
    out.descendants = std::move(o.descendants);
    out.parents = std::move(o.parents);
    out.oriented = std::move(o.edges);
  }
  out.queries = oracle.query_count();
  return out;
}

bool test_condition(CiOracle& oracle, const std::string& target) {
  return run_discovery(oracle, target).condition_holds;
}

}  // namespace stablesel
