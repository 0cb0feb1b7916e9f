#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablesel/scm.hpp"

namespace stablesel {

struct WorstCaseResult {
  double risk = 0.0;
  Policy argmax;            // lexicographically first maximizer
  double policy_count = 0;  // size of the enumerated policy space
};

// Exact worst-case risk of the predictor built on s, maximized over every
// deterministic assignment of the mutable variables' kernels. The maximum
// over stochastic kernels is attained at a deterministic one, so this is the
// full supremum. Throws CapError when the policy space exceeds cap; jobs > 1
// splits the enumeration across threads without changing the result.
WorstCaseResult worst_case_risk(const DiscreteScm& scm, const std::set<std::string>& s,
                                double cap = 1e6, int jobs = 1);

struct GraphicalCondition {
  bool holds = false;
  std::set<std::string> xm0;  // mutable children of the target
  std::set<std::string> w;    // strict descendants of xm0
  std::set<std::string> w2;   // covariates outside xm0 and its descendants
};

// Structural test for whether the full stable set is minimax optimal: it
// holds exactly when the target has no edge into a strict descendant of a
// mutable child.
GraphicalCondition graphical_condition(const MixedGraph& g, const ProblemSpec& spec);

struct DegenerationWitness {
  std::string env;
  std::map<std::string, int> config;  // assignment to the stable and mutable variables
  int y = 0;
  double interventional = 0.0;
  double observational = 0.0;
};

struct DegenerationReport {
  bool holds = true;
  std::optional<DegenerationWitness> witness;  // first violation found
  long long checked = 0;                       // non-degenerate configurations compared
};

// Numerical check that P(Y | x_S, do(x_M)) equals the observational
// P^e(Y | w2) in every environment, within tol. Vacuously true without
// mutable variables.
DegenerationReport check_degeneration(const DiscreteScm& scm, double tol = 1e-9);

struct RankedRisk {
  std::set<std::string> representative;
  double risk = 0.0;
};

struct SubsetSelection {
  std::set<std::string> chosen;
  std::string reason;  // "graphical-condition" or "risk-minimization"
  bool risks_computed = false;
  std::vector<RankedRisk> ranking;  // ascending risk, then cardinality, then lex
  GraphicalCondition condition;
};

// Returns the full stable set when the graphical condition holds; otherwise
// ranks one worst-case risk per equivalence-class representative and picks
// the best.
SubsetSelection select_optimal_subset(const DiscreteScm& scm, double cap = 1e6, int jobs = 1);

// Three-variable model witnessing that more stable features can strictly
// increase the worst-case risk: the lone stable variable is a descendant of
// the mutable one, and using it is beaten by the empty feature set.
DiscreteScm counterexample_scm();

}  // namespace stablesel
