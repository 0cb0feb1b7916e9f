#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "stablesel/equivalence.hpp"
#include "stablesel/error.hpp"
#include "stablesel/graph.hpp"
#include "stablesel/random_gen.hpp"

using namespace stablesel;

namespace {

using Cell = std::pair<std::set<std::string>, std::set<std::string>>;

std::vector<Cell> cells_of(const Partition& p) {
  std::vector<Cell> out;
  for (const auto& c : p.classes) out.push_back({c.representative, c.free});
  return out;
}

}  // namespace

TEST_CASE("five covariate fixture partitions into eleven frozen classes") {
  oracle::Problem p = oracle::eleven_class_problem();
  Partition part = recover_classes(p.graph, p.spec);

  std::vector<Cell> expected{
      {{}, {"X_5"}},
      {{"X_1"}, {"X_2", "X_4", "X_5"}},
      {{"X_1", "X_3"}, {"X_2", "X_5"}},
      {{"X_1", "X_3", "X_4"}, {"X_2", "X_5"}},
      {{"X_2"}, {"X_5"}},
      {{"X_2", "X_3"}, {"X_5"}},
      {{"X_2", "X_3", "X_4"}, {"X_5"}},
      {{"X_2", "X_4"}, {"X_5"}},
      {{"X_3"}, {"X_5"}},
      {{"X_3", "X_4"}, {"X_5"}},
      {{"X_4"}, {"X_5"}},
  };
  CHECK(cells_of(part) == expected);
  CHECK(part.classes.size() == 11);
  CHECK(part.nodes == 15);
  CHECK(part.nodes <= 2 * (long long)part.classes.size());

  unsigned long long total = 0;
  for (const auto& c : part.classes) total += c.size();
  CHECK(total == 32);  // every subset of five stable variables, once

  Partition brute = brute_force_partition(p.graph, p.spec);
  CHECK(cells_of(brute) == expected);
  CHECK(brute.nodes == 0);

  SUBCASE("member listings expand the free set") {
    const EquivalenceClass& big = part.classes[1];
    auto members = big.members();
    REQUIRE(members.size() == 8);
    CHECK(members.front() == std::set<std::string>{"X_1"});
    CHECK(members.back() == std::set<std::string>{"X_1", "X_5"});
    CHECK(std::count(members.begin(), members.end(),
                     std::set<std::string>{"X_1", "X_2", "X_4", "X_5"}) == 1);
  }
}

TEST_CASE("pairwise equivalence matches the class table") {
  oracle::Problem p = oracle::eleven_class_problem();
  CHECK(are_equivalent(p.graph, p.spec, {"X_1"}, {"X_1", "X_2"}));
  CHECK(are_equivalent(p.graph, p.spec, {"X_1", "X_2"}, {"X_1"}));
  CHECK(are_equivalent(p.graph, p.spec, {"X_2"}, {"X_2", "X_5"}));
  CHECK(are_equivalent(p.graph, p.spec, {"X_1", "X_3"}, {"X_1", "X_2", "X_3"}));
  CHECK_FALSE(are_equivalent(p.graph, p.spec, {}, {"X_1"}));
  CHECK_FALSE(are_equivalent(p.graph, p.spec, {"X_1", "X_3"}, {"X_1", "X_3", "X_4"}));
  CHECK_FALSE(are_equivalent(p.graph, p.spec, {"X_2"}, {"X_4"}));
  CHECK(are_equivalent(p.graph, p.spec, {"X_3"}, {"X_3"}));
  CHECK_THROWS_AS(are_equivalent(p.graph, p.spec, {"Y"}, {"X_1"}), InputError);
  CHECK_THROWS_AS(are_equivalent(p.graph, p.spec, {"X_9"}, {"X_1"}), InputError);
}

TEST_CASE("partition depends only on the markov equivalence class") {
  oracle::Problem p = oracle::eleven_class_problem();
  Partition reference = recover_classes(p.graph, p.spec);
  auto dags = oracle::markov_equivalent_dags(p.graph);
  CHECK(dags.size() >= 2);
  for (const MixedGraph& g : dags) {
    Partition part = recover_classes(g, p.spec);
    CHECK(cells_of(part) == cells_of(reference));
  }
}

TEST_CASE("recursive recovery agrees with the brute force partition") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    int n_stable = rng.uniform_int(1, 6);
    int n_mutable = rng.uniform_int(0, 2);
    RandomProblem prob = random_problem(rng, n_stable, n_mutable, 0.45);
    Partition fast = recover_classes(prob.graph, prob.spec);
    Partition slow = brute_force_partition(prob.graph, prob.spec);
    REQUIRE(cells_of(fast) == cells_of(slow));
    REQUIRE(fast.nodes <= 2 * (long long)fast.classes.size());
    unsigned long long total = 0;
    for (const auto& c : fast.classes) total += c.size();
    REQUIRE(total == 1ull << n_stable);
  }
}

TEST_CASE("class lookup returns the covering cell") {
  oracle::Problem p = oracle::eleven_class_problem();
  Partition part = recover_classes(p.graph, p.spec);
  for (const auto& c : part.classes)
    for (const auto& m : c.members()) {
      const EquivalenceClass& found = class_of(part, m, p.spec.stable);
      REQUIRE(found.representative == c.representative);
    }
  CHECK_THROWS_AS(class_of(part, {"Y"}, p.spec.stable), InputError);
  CHECK_THROWS_AS(class_of(part, {"X_7"}, p.spec.stable), InputError);
}

TEST_CASE("exponential paths refuse oversized inputs") {
  Rng rng(37);
  RandomProblem prob = random_problem(rng, 9, 0, 0.3);
  CHECK_THROWS_AS(brute_force_partition(prob.graph, prob.spec), CapError);
  CHECK_NOTHROW(recover_classes(prob.graph, prob.spec));

  EquivalenceClass wide;
  for (int i = 0; i < 21; ++i) wide.free.insert("F" + std::to_string(100 + i));
  CHECK_THROWS_AS(wide.members(), CapError);
  CHECK(wide.size() == (1ull << 21));
  for (int i = 0; i < 42; ++i) wide.free.insert("G" + std::to_string(100 + i));
  CHECK_THROWS_AS(wide.size(), CapError);
}
