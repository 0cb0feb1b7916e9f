#include "stablesel/random_gen.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "stablesel/error.hpp"

namespace stablesel {

namespace {

std::string numbered(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

}  // namespace

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw InputError("uniform_int needs lo <= hi");
  unsigned long long span = (unsigned long long)(hi - lo) + 1;
  return lo + (int)(next_u64() % span);
}

double Rng::uniform_real() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

std::vector<double> Rng::dirichlet(int k) {
  if (k < 1) throw InputError("dirichlet needs a positive dimension");
  std::vector<double> x((size_t)k);
  double total = 0;
  for (double& xi : x) {
    double u = uniform_real();
    if (u < 1e-300) u = 1e-300;
    xi = -std::log(u);
    total += xi;
  }
  for (double& xi : x) xi /= total;
  return x;
}

MixedGraph random_dag(Rng& rng, const std::vector<std::string>& names, double edge_prob) {
  if (edge_prob < 0 || edge_prob > 1) throw InputError("edge_prob must lie in [0, 1]");
  std::vector<std::string> order = names;
  rng.shuffle(order);
  std::vector<std::pair<std::string, std::string>> arcs;
  for (size_t j = 1; j < order.size(); ++j)
    for (size_t i = 0; i < j; ++i)
      if (rng.uniform_real() < edge_prob) arcs.push_back({order[i], order[j]});
  return MixedGraph::dag(names, arcs);
}

MixedGraph random_tree(Rng& rng, const std::vector<std::string>& names) {
  if (names.empty()) throw InputError("random_tree needs at least one vertex");
  std::vector<std::string> order = names;
  rng.shuffle(order);
  std::vector<std::pair<std::string, std::string>> arcs;
  for (size_t j = 1; j < order.size(); ++j)
    arcs.push_back({order[rng.uniform_int(0, (int)j - 1)], order[j]});
  return MixedGraph::dag(names, arcs);
}

RandomProblem random_problem(Rng& rng, int n_stable, int n_mutable, double edge_prob) {
  if (n_stable < 0 || n_mutable < 0) throw InputError("variable counts must be nonnegative");
  ProblemSpec spec;
  spec.target = "Y";
  std::vector<std::string> names{"Y"};
  for (int i = 1; i <= n_stable; ++i) {
    names.push_back(numbered("S", i));
    spec.stable.insert(names.back());
  }
  for (int i = 1; i <= n_mutable; ++i) {
    names.push_back(numbered("M", i));
    spec.mutable_vars.insert(names.back());
  }
  return {random_dag(rng, names, edge_prob), spec};
}

DiscreteScm random_scm_on(Rng& rng, const MixedGraph& g, const ProblemSpec& spec,
                          const ScmOptions& opt) {
  if (opt.max_domain < 2) throw InputError("max_domain must be at least 2");
  if (opt.n_envs < 1) throw InputError("n_envs must be positive");
  validate_spec(g, spec);
  std::map<std::string, int> domains;
  for (const std::string& v : g.vertex_ids()) domains[v] = rng.uniform_int(2, opt.max_domain);
  auto rows_for = [&](const std::string& v) {
    long long rows = 1;
    for (const std::string& p : g.parents(v)) rows *= domains[p];
    std::vector<std::vector<double>> table;
    for (long long r = 0; r < rows; ++r) table.push_back(rng.dirichlet(domains[v]));
    return table;
  };
  std::map<std::string, std::vector<std::vector<double>>> cpt;
  cpt[spec.target] = rows_for(spec.target);
  for (const std::string& v : spec.stable) cpt[v] = rows_for(v);
  std::vector<std::string> envs;
  for (int e = 1; e <= opt.n_envs; ++e) envs.push_back(numbered("e", e));
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> mutable_cpt;
  for (const std::string& v : spec.mutable_vars)
    for (const std::string& e : envs) mutable_cpt[v][e] = rows_for(v);
  std::vector<double> y_values;
  for (int i = 0; i < domains[spec.target]; ++i) y_values.push_back(rng.uniform_real());
  return DiscreteScm(g, spec, domains, y_values, cpt, mutable_cpt, envs);
}

DiscreteScm random_scm(Rng& rng, int n_stable, int n_mutable, double edge_prob,
                       const ScmOptions& opt) {
  if (opt.max_domain < 2) throw InputError("max_domain must be at least 2");
  if (opt.n_envs < 1) throw InputError("n_envs must be positive");
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    RandomProblem prob = random_problem(rng, n_stable, n_mutable, edge_prob);
    bool admissible = true;
    for (const std::string& m : prob.spec.mutable_vars)
      if ((int)prob.graph.parents(m).size() > opt.max_mutable_parents) {
        admissible = false;
        break;
      }
    if (!admissible) continue;
    return random_scm_on(rng, prob.graph, prob.spec, opt);
  }
  throw CapError("no admissible graph within the attempt budget");
}

}  // namespace stablesel
