#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stablesel/graph.hpp"

namespace stablesel {

// Dense table over a sorted variable tuple. Row index is mixed radix with
// the first variable as the most significant digit.
struct ValueTable {
  std::vector<std::string> vars;
  std::vector<int> radices;
  std::vector<double> values;

  std::size_t index_of(const std::vector<int>& config) const;
  double at(const std::vector<int>& config) const;
};

// Discrete structural model over a dag. Tables for the target and the stable
// variables are shared across environments; each mutable variable carries one
// table per environment. Table rows are parent configurations in mixed radix
// over the sorted parent list, first parent most significant; each row is a
// distribution over the variable's domain.
struct DiscreteScm {
  MixedGraph graph;
  ProblemSpec spec;
  std::map<std::string, int> domains;
  std::vector<double> y_values;  // numeric reading of the target's levels
  std::map<std::string, std::vector<std::vector<double>>> cpt;
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> mutable_cpt;
  std::vector<std::string> environments;

  DiscreteScm(MixedGraph graph_in, ProblemSpec spec_in, std::map<std::string, int> domains_in,
              std::vector<double> y_values_in,
              std::map<std::string, std::vector<std::vector<double>>> cpt_in,
              std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>>
                  mutable_cpt_in,
              std::vector<std::string> environments_in);

  int domain(const std::string& v) const;
  std::vector<std::string> sorted_parents(const std::string& v) const;
  std::size_t parent_config_count(const std::string& v) const;
};

// One deterministic kernel per mutable variable: a value for each parent
// configuration, indexed like the variable's table rows.
using Policy = std::map<std::string, std::vector<int>>;

// Joint distribution of the non-mutable variables under do(x_M).
// `do_values` must assign every mutable variable. Environment-free.
ValueTable interventional_distribution(const DiscreteScm& scm,
                                       const std::map<std::string, int>& do_values);

// Joint distribution of all variables in one environment.
ValueTable observational_distribution(const DiscreteScm& scm, const std::string& env);

// E[Y | x_s, do(x_M)] tabulated over sorted(s | mutable). Configurations with
// zero mass under do(x_M) fall back to the interventional mean of Y there.
ValueTable stable_predictor(const DiscreteScm& scm, const std::set<std::string>& s);

// Squared-error risk of predictor f when every mutable variable follows the
// given deterministic policy.
double policy_risk(const DiscreteScm& scm, const ValueTable& f, const Policy& policy);

// Precomputed state for repeated policy-risk queries against one predictor.
// A policy is flattened to one digit per (mutable variable, parent
// configuration): variables in topological order, rows ascending within a
// variable, digit 0 most significant. risk() is safe to call concurrently.
class PolicyEvaluator {
 public:
  PolicyEvaluator(const DiscreteScm& scm, const ValueTable& f);

  std::size_t digit_count() const { return digit_radices_.size(); }
  const std::vector<int>& digit_radices() const { return digit_radices_; }
  double risk(const std::vector<int>& digits) const;
  std::vector<int> flatten(const Policy& policy) const;
  Policy unflatten(const std::vector<int>& digits) const;

 private:
  const DiscreteScm* scm_;
  const ValueTable* f_;
  int n_vars_ = 0;
  std::vector<int> digit_radices_;
  // Mutable variables in topological order.
  std::vector<std::string> mutable_names_;
  std::vector<int> mutable_idx_;
  std::vector<int> mutable_dom_;
  std::vector<int> mutable_offset_;
  std::vector<std::vector<int>> mutable_parent_idx_;
  std::vector<std::vector<int>> mutable_parent_dom_;
  // Non-mutable variables in sorted order; the enumerated configuration space.
  std::vector<int> enum_idx_;
  std::vector<int> enum_radices_;
  std::vector<const std::vector<std::vector<double>>*> enum_tables_;
  std::vector<std::vector<int>> enum_parent_idx_;
  std::vector<std::vector<int>> enum_parent_dom_;
  std::size_t enum_total_ = 0;
  std::vector<int> f_pos_;
  std::vector<int> f_radices_;
  int y_idx_ = 0;
};

}  // namespace stablesel
