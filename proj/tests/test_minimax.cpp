#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "stablesel/error.hpp"
#include "stablesel/minimax.hpp"
#include "stablesel/random_gen.hpp"
#include "stablesel/scm.hpp"

using namespace stablesel;

namespace {

// Every deterministic policy of the model, odometer over (variable, row).
std::vector<Policy> all_policies(const DiscreteScm& scm) {
  std::vector<std::string> vars(scm.spec.mutable_vars.begin(), scm.spec.mutable_vars.end());
  std::vector<std::pair<std::string, int>> slots;  // (variable, domain) per row
  for (const auto& v : vars)
    for (std::size_t r = 0; r < scm.parent_config_count(v); ++r)
      slots.push_back({v, scm.domain(v)});
  std::vector<int> digits(slots.size(), 0);
  std::vector<Policy> out;
  while (true) {
    Policy p;
    for (const auto& v : vars) p[v] = {};
    for (std::size_t i = 0; i < slots.size(); ++i) p[slots[i].first].push_back(digits[i]);
    out.push_back(p);
    std::size_t k = slots.size();
    while (k > 0) {
      if (++digits[k - 1] < slots[k - 1].second) break;
      digits[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return out;
}

std::map<std::string, std::vector<std::vector<double>>> one_hot(const DiscreteScm& scm,
                                                                const Policy& p) {
  std::map<std::string, std::vector<std::vector<double>>> kernels;
  for (const auto& [v, rows] : p) {
    std::vector<std::vector<double>> table;
    for (int pick : rows) {
      std::vector<double> row(scm.domain(v), 0.0);
      row[pick] = 1.0;
      table.push_back(row);
    }
    kernels[v] = table;
  }
  return kernels;
}

std::map<std::string, std::vector<std::vector<double>>> random_kernels(const DiscreteScm& scm,
                                                                       Rng& rng) {
  std::map<std::string, std::vector<std::vector<double>>> kernels;
  for (const auto& v : scm.spec.mutable_vars) {
    std::vector<std::vector<double>> table;
    for (std::size_t r = 0; r < scm.parent_config_count(v); ++r)
      table.push_back(rng.dirichlet(scm.domain(v)));
    kernels[v] = table;
  }
  return kernels;
}

}  // namespace

TEST_CASE("counterexample model prefers the empty feature set") {
  DiscreteScm scm = counterexample_scm();
  WorstCaseResult with_stable = worst_case_risk(scm, {"X_s"});
  WorstCaseResult with_nothing = worst_case_risk(scm, {});

  CHECK(with_nothing.risk == doctest::Approx(0.000999).epsilon(1e-12));
  CHECK(with_stable.risk == doctest::Approx(0.001247751001).epsilon(1e-9));
  CHECK(with_stable.risk > with_nothing.risk);
  CHECK(with_stable.policy_count == 4);
  REQUIRE(with_stable.argmax.count("X_m"));
  CHECK(with_stable.argmax.at("X_m") == std::vector<int>{1, 0});

  SUBCASE("selection ranks the empty set first") {
    SubsetSelection sel = select_optimal_subset(scm);
    CHECK(sel.chosen.empty());
    CHECK(sel.reason == "risk-minimization");
    CHECK(sel.risks_computed);
    CHECK_FALSE(sel.condition.holds);
    CHECK(sel.condition.xm0 == std::set<std::string>{"X_m"});
    CHECK(sel.condition.w == std::set<std::string>{"X_s"});
    CHECK(sel.condition.w2.empty());
    REQUIRE(sel.ranking.size() == 2);
    CHECK(sel.ranking[0].representative.empty());
    CHECK(sel.ranking[0].risk == doctest::Approx(0.000999).epsilon(1e-12));
    CHECK(sel.ranking[1].representative == std::set<std::string>{"X_s"});
    CHECK(sel.ranking[1].risk >= sel.ranking[0].risk);
  }
}

TEST_CASE("predictor table matches hand computed conditionals") {
  DiscreteScm scm = counterexample_scm();
  ValueTable f = stable_predictor(scm, {"X_s"});
  REQUIRE(f.vars == std::vector<std::string>{"X_m", "X_s"});
  CHECK(f.at({0, 0}) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(f.at({0, 1}) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(f.at({1, 0}) == doctest::Approx(1e-6 / 0.998002).epsilon(1e-9));
  CHECK(f.at({1, 1}) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("sampling estimate lands on the same cells") {
    Rng rng(41);
    double flat = oracle::mc_predictor(scm, {}, {{"X_m", 0}}, 100000, rng);
    CHECK(flat == doctest::Approx(0.001).epsilon(2.0));  // coarse: rare event
    double mid = oracle::mc_predictor(scm, {{"X_s", 1}}, {{"X_m", 1}}, 400000, rng);
    CHECK(mid == doctest::Approx(0.5).epsilon(0.25));
  }
}

TEST_CASE("deterministic enumeration attains the stochastic supremum") {
  Rng rng(43);
  int models = 0;
  while (models < 8) {
    DiscreteScm scm = random_scm(rng, rng.uniform_int(1, 3), rng.uniform_int(1, 2), 0.5);
    if (scm.spec.mutable_vars.empty()) continue;
    ++models;
    std::set<std::string> s = scm.spec.stable;
    WorstCaseResult wc = worst_case_risk(scm, s);
    ValueTable f = stable_predictor(scm, s);

    double best = -1.0;
    for (const Policy& p : all_policies(scm)) {
      double r = oracle::stochastic_policy_risk(scm, f, one_hot(scm, p));
      REQUIRE(r == doctest::Approx(policy_risk(scm, f, p)).epsilon(1e-9));
      best = std::max(best, r);
    }
    REQUIRE(wc.risk == doctest::Approx(best).epsilon(1e-9));

    for (int k = 0; k < 200; ++k) {
      double r = oracle::stochastic_policy_risk(scm, f, random_kernels(scm, rng));
      REQUIRE(r <= wc.risk + 1e-9);
    }
  }
}

TEST_CASE("thread count never changes the answer") {
  DiscreteScm scm = counterexample_scm();
  WorstCaseResult one = worst_case_risk(scm, {"X_s"}, 1e6, 1);
  WorstCaseResult three = worst_case_risk(scm, {"X_s"}, 1e6, 3);
  CHECK(one.risk == three.risk);
  CHECK(one.argmax == three.argmax);

  Rng rng(47);
  DiscreteScm big = random_scm(rng, 3, 2, 0.5);
  std::set<std::string> s = big.spec.stable;
  WorstCaseResult a = worst_case_risk(big, s, 1e6, 1);
  WorstCaseResult b = worst_case_risk(big, s, 1e6, 4);
  CHECK(a.risk == b.risk);
  CHECK(a.argmax == b.argmax);
}

TEST_CASE("guards on the policy enumeration") {
  DiscreteScm scm = counterexample_scm();
  CHECK_THROWS_AS(worst_case_risk(scm, {"X_s"}, 3.0), CapError);
  CHECK_THROWS_AS(worst_case_risk(scm, {"X_s"}, 1e6, 0), InputError);
  CHECK_THROWS_AS(worst_case_risk(scm, {"X_m"}), InputError);
  CHECK_THROWS_AS(stable_predictor(scm, {"Y"}), InputError);
}

TEST_CASE("structural test on the fixture graphs") {
  oracle::Problem holds = oracle::condition_holds_problem();
  GraphicalCondition ch = graphical_condition(holds.graph, holds.spec);
  CHECK(ch.holds);
  CHECK(ch.xm0 == std::set<std::string>{"X_M"});
  CHECK(ch.w == std::set<std::string>{"X_1"});
  CHECK(ch.w2 == std::set<std::string>{"X_2"});

  oracle::Problem fails = oracle::condition_fails_problem();
  GraphicalCondition cf = graphical_condition(fails.graph, fails.spec);
  CHECK_FALSE(cf.holds);
  CHECK(cf.xm0 == std::set<std::string>{"X_M"});
  CHECK(cf.w == std::set<std::string>{"X_1"});
  CHECK(cf.w2.empty());

  oracle::Problem none = oracle::eleven_class_problem();
  GraphicalCondition cn = graphical_condition(none.graph, none.spec);
  CHECK(cn.holds);  // vacuous without mutable children
  CHECK(cn.xm0.empty());
}

TEST_CASE("degeneration check separates the two fixtures") {
  ScmOptions opt;
  SUBCASE("models on the passing graph always degenerate") {
    oracle::Problem p = oracle::condition_holds_problem();
    Rng rng(53);
    for (int i = 0; i < 10; ++i) {
      DiscreteScm scm = random_scm_on(rng, p.graph, p.spec, opt);
      DegenerationReport rep = check_degeneration(scm);
      REQUIRE(rep.holds);
      REQUIRE(rep.checked > 0);
    }
  }
  SUBCASE("models on the failing graph almost never do") {
    oracle::Problem p = oracle::condition_fails_problem();
    Rng rng(59);
    int failed = 0;
    for (int i = 0; i < 10; ++i) {
      DiscreteScm scm = random_scm_on(rng, p.graph, p.spec, opt);
      DegenerationReport rep = check_degeneration(scm);
      if (!rep.holds) {
        ++failed;
        REQUIRE(rep.witness.has_value());
        CHECK(std::abs(rep.witness->interventional - rep.witness->observational) > 1e-9);
      }
    }
    CHECK(failed >= 8);
  }
  SUBCASE("no mutable variables means nothing to compare") {
    Rng rng(61);
    RandomProblem prob = random_problem(rng, 2, 0, 0.5);
    DiscreteScm scm = random_scm_on(rng, prob.graph, prob.spec, opt);
    DegenerationReport rep = check_degeneration(scm);
    CHECK(rep.holds);
    CHECK(rep.checked == 0);
  }
}

TEST_CASE("selection takes the graphical shortcut when it can") {
  oracle::Problem p = oracle::condition_holds_problem();
  Rng rng(67);
  DiscreteScm scm = random_scm_on(rng, p.graph, p.spec, {});
  SubsetSelection sel = select_optimal_subset(scm);
  CHECK(sel.chosen == p.spec.stable);
  CHECK(sel.reason == "graphical-condition");
  CHECK_FALSE(sel.risks_computed);
  CHECK(sel.ranking.empty());
  CHECK(sel.condition.holds);
}
