#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stablesel/graph.hpp"
#include "stablesel/scm.hpp"

namespace stablesel {

// Seeded generator with hand-rolled derivations so that a seed produces the
// same draws on every platform; the distribution classes in <random> do not
// promise that.
class Rng {
 public:
  explicit Rng(unsigned long long seed) : engine_(seed) {}

  unsigned long long next_u64() { return engine_(); }
  int uniform_int(int lo, int hi);  // inclusive bounds
  double uniform_real();            // [0, 1)
  std::vector<double> dirichlet(int k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = (size_t)(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Dag over the given names: a shuffled topological order, then each forward
// pair becomes an arc with probability edge_prob.
MixedGraph random_dag(Rng& rng, const std::vector<std::string>& names, double edge_prob);

// Directed tree over the given names: a shuffled order, then each vertex
// attaches below a uniformly chosen earlier one.
MixedGraph random_tree(Rng& rng, const std::vector<std::string>& names);

struct RandomProblem {
  MixedGraph graph;
  ProblemSpec spec;
};

// Random dag over target "Y", stable "S01".., and mutable "M01..".
RandomProblem random_problem(Rng& rng, int n_stable, int n_mutable, double edge_prob);

struct ScmOptions {
  int max_domain = 2;
  int n_envs = 2;
  int max_mutable_parents = 2;  // keeps the policy space enumerable
  int max_attempts = 1000;
};

// Dirichlet tables on a fixed graph. max_mutable_parents and max_attempts
// are ignored here; the caller owns the structure.
DiscreteScm random_scm_on(Rng& rng, const MixedGraph& g, const ProblemSpec& spec,
                          const ScmOptions& opt = {});

// Random problem plus Dirichlet tables; graphs whose mutable variables have
// too many parents are redrawn, up to max_attempts.
DiscreteScm random_scm(Rng& rng, int n_stable, int n_mutable, double edge_prob,
                       const ScmOptions& opt = {});

}  // namespace stablesel
