#pragma once

#include <string>
#include <utility>

#include "json.hpp"
#include "stablesel/complexity.hpp"
#include "stablesel/discovery.hpp"
#include "stablesel/equivalence.hpp"
#include "stablesel/graph.hpp"
#include "stablesel/minimax.hpp"
#include "stablesel/scm.hpp"

namespace stablesel {

using Json = nlohmann::ordered_json;

// Shortest decimal with 12 significant digits, read back; keeps serialized
// numbers identical across reruns that differ in the last bits.
double round12(double x);

Json parse_json_text(const std::string& text);  // InputError on bad syntax
Json load_json_file(const std::string& path);

Json graph_to_json(const MixedGraph& g);
MixedGraph graph_from_json(const Json& j);

// A problem file is a graph object with "target", "stable", and "mutable".
Json problem_to_json(const MixedGraph& g, const ProblemSpec& spec);
std::pair<MixedGraph, ProblemSpec> problem_from_json(const Json& j);

Json scm_to_json(const DiscreteScm& scm);
DiscreteScm scm_from_json(const Json& j);

Json partition_to_json(const Partition& p, bool with_members);
Json worst_case_to_json(const WorstCaseResult& r);
Json selection_to_json(const SubsetSelection& sel);
Json discovery_to_json(const DiscoveryResult& r);
Json complexity_to_json(const ComplexityReport& r);

}  // namespace stablesel
