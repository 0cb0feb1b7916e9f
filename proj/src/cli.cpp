#include "stablesel/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "stablesel/complexity.hpp"
#include "stablesel/discovery.hpp"
#include "stablesel/equivalence.hpp"
#include "stablesel/error.hpp"
#include "stablesel/json_io.hpp"
#include "stablesel/minimax.hpp"
#include "stablesel/random_gen.hpp"

namespace stablesel {

namespace {

void write_output(const Json& j, const std::string& path, std::ostream& out) {
  std::string text = j.dump(2);
  if (path.empty()) {
    out << text << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write file: " + path);
  f << text << "\n";
}

void emit_error(std::ostream& err, const char* type, const std::string& message) {
  Json j;
  j["error"] = Json{{"type", type}, {"message", message}};
  err << j.dump() << "\n";
}

std::string numbered(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

// Directed path Y -> X01 -> ... -> X0d, closed into a cycle when asked.
std::pair<MixedGraph, ProblemSpec> line_problem(int d, bool close) {
  std::vector<std::string> names{"Y"};
  std::vector<std::pair<std::string, std::string>> arcs;
  ProblemSpec spec;
  spec.target = "Y";
  std::string prev = "Y";
  for (int i = 1; i <= d; ++i) {
    names.push_back(numbered("X", i));
    spec.stable.insert(names.back());
    arcs.push_back({prev, names.back()});
    prev = names.back();
  }
  if (close) arcs.push_back({"Y", prev});
  return {MixedGraph::dag(names, arcs), spec};
}

struct CliOptions {
  std::string graph_path;
  std::string scm_path;
  std::string input_path;
  std::string out_path;
  std::string kind;
  std::string sweep;
  std::string target = "Y";
  bool brute_force = false;
  bool members = false;
  bool certify = false;
  bool oracle = false;
  int cap_bruteforce = 8;
  int jobs = 1;
  int max_d = 8;
  int n_stable = 4;
  int n_mutable = 1;
  int max_domain = 2;
  double cap_policies = 1e6;
  double alpha = 0.05;
  double edge_prob = 0.4;
  long long cap_nodes = 1000000;
  unsigned long long seed = 1;
};

void run_recover(const CliOptions& o, std::ostream& out) {
  auto [g, spec] = problem_from_json(load_json_file(o.graph_path));
  Partition p = o.brute_force ? brute_force_partition(g, spec, o.cap_bruteforce)
                              : recover_classes(g, spec);
  write_output(partition_to_json(p, o.members), o.out_path, out);
}

void run_select(const CliOptions& o, std::ostream& out) {
  DiscreteScm scm = scm_from_json(load_json_file(o.scm_path));
  SubsetSelection sel = select_optimal_subset(scm, o.cap_policies, o.jobs);
  write_output(selection_to_json(sel), o.out_path, out);
}

void run_discover(const CliOptions& o, std::ostream& out) {
  bool is_csv = o.input_path.size() >= 4 &&
                o.input_path.compare(o.input_path.size() - 4, 4, ".csv") == 0;
  if (o.oracle && is_csv) throw InputError("oracle mode needs a graph json file");
  if (is_csv) {
    std::ifstream in(o.input_path);
    if (!in) throw InputError("cannot read file: " + o.input_path);
    GTestCiOracle oracle = GTestCiOracle::from_csv(in, "env", o.alpha);
    write_output(discovery_to_json(run_discovery(oracle, o.target)), o.out_path, out);
    return;
  }
  auto [g, spec] = problem_from_json(load_json_file(o.input_path));
  AugmentedGraph aug = augment(g, spec);
  GraphCiOracle oracle(aug);
  GraphOrientationOracle orient(aug.graph);
  write_output(discovery_to_json(run_discovery(oracle, spec.target, &orient)), o.out_path,
               out);
}

void run_complexity(const CliOptions& o, std::ostream& out) {
  if (!o.sweep.empty()) {
    if (o.sweep != "chain" && o.sweep != "circle")
      throw InputError("sweep must be chain or circle");
    if (o.max_d < 1) throw InputError("max-d must be positive");
    bool circle = o.sweep == "circle";
    Json rows = Json::array();
    for (int d = circle ? 3 : 1; d <= o.max_d; ++d) {
      auto [g, spec] = line_problem(d, circle);
      ComplexityReport rep = certify_bounds(g, spec, 16, o.cap_nodes);
      Json row;
      row["d"] = d;
      row["f"] = rep.f;
      if (rep.n)
        row["n"] = *rep.n;
      else
        row["n"] = nullptr;
      row["bound_verdict"] = rep.bound_verdict;
      rows.push_back(std::move(row));
    }
    write_output(rows, o.out_path, out);
    return;
  }
  if (o.graph_path.empty()) throw InputError("complexity needs --graph or --sweep");
  auto [g, spec] = problem_from_json(load_json_file(o.graph_path));
  ComplexityReport rep = o.certify ? certify_bounds(g, spec, 16, o.cap_nodes)
                                   : compute_f(g, spec, o.cap_nodes);
  write_output(complexity_to_json(rep), o.out_path, out);
}

void run_generate(const CliOptions& o, std::ostream& out) {
  Rng rng(o.seed);
  if (o.kind == "graph") {
    RandomProblem p = random_problem(rng, o.n_stable, o.n_mutable, o.edge_prob);
    write_output(problem_to_json(p.graph, p.spec), o.out_path, out);
  } else if (o.kind == "tree") {
    std::vector<std::string> names{"Y"};
    ProblemSpec spec;
    spec.target = "Y";
    for (int i = 1; i <= o.n_stable; ++i) {
      names.push_back(numbered("S", i));
      spec.stable.insert(names.back());
    }
    write_output(problem_to_json(random_tree(rng, names), spec), o.out_path, out);
  } else if (o.kind == "scm") {
    ScmOptions opt;
    opt.max_domain = o.max_domain;
    DiscreteScm scm = random_scm(rng, o.n_stable, o.n_mutable, o.edge_prob, opt);
    write_output(scm_to_json(scm), o.out_path, out);
  } else {
    throw InputError("kind must be graph, scm, or tree");
  }
}

void run_counterexample(const CliOptions& o, std::ostream& out) {
  DiscreteScm scm = counterexample_scm();
  WorstCaseResult with_stable = worst_case_risk(scm, scm.spec.stable);
  WorstCaseResult with_empty = worst_case_risk(scm, {});
  SubsetSelection sel = select_optimal_subset(scm);
  Json j;
  j["scm"] = scm_to_json(scm);
  j["risk_stable"] = round12(with_stable.risk);
  j["risk_empty"] = round12(with_empty.risk);
  j["strictly_greater"] = with_stable.risk > with_empty.risk;
  j["chosen"] = Json(sel.chosen);
  write_output(j, o.out_path, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliOptions o;
  CLI::App app{"Worst-case risk tools for stable feature sets"};
  app.name("stablesel");
  app.require_subcommand(1);

  CLI::App* recover = app.add_subcommand("recover", "Partition stable subsets into classes");
  recover->add_option("--graph", o.graph_path, "problem json file")->required();
  recover->add_flag("--brute-force", o.brute_force, "pairwise partition instead of recursion");
  recover->add_option("--cap-bruteforce", o.cap_bruteforce, "stable-set size cap for brute force");
  recover->add_flag("--members", o.members, "list every member of each class");
  recover->add_option("--out", o.out_path, "write the result here instead of stdout");

  CLI::App* select = app.add_subcommand("select", "Pick the subset with least worst-case risk");
  select->add_option("--scm", o.scm_path, "scm json file")->required();
  select->add_option("--cap-policies", o.cap_policies, "policy enumeration cap");
  select->add_option("--jobs", o.jobs, "worker threads for the enumeration");
  select->add_option("--out", o.out_path, "write the result here instead of stdout");

  CLI::App* discover = app.add_subcommand("discover", "Recover structure from an oracle or csv data");
  discover->add_option("--input", o.input_path, "problem json (oracle mode) or csv data")->required();
  discover->add_option("--alpha", o.alpha, "significance level for the csv independence test");
  discover->add_flag("--oracle", o.oracle, "force oracle mode");
  discover->add_option("--target", o.target, "target column for csv inputs");
  discover->add_option("--out", o.out_path, "write the result here instead of stdout");

  CLI::App* complexity = app.add_subcommand("complexity", "Count classes from chain structure");
  complexity->add_option("--graph", o.graph_path, "problem json file");
  complexity->add_flag("--certify", o.certify, "also recover classes and check the bounds");
  complexity->add_option("--cap-nodes", o.cap_nodes, "recursion node cap");
  complexity->add_option("--sweep", o.sweep, "tabulate a family: chain or circle");
  complexity->add_option("--max-d", o.max_d, "largest family size for --sweep");
  complexity->add_option("--out", o.out_path, "write the result here instead of stdout");

  CLI::App* generate = app.add_subcommand("generate", "Draw a seeded random problem");
  generate->add_option("--kind", o.kind, "graph, scm, or tree")->required();
  generate->add_option("--stable", o.n_stable, "number of stable variables");
  generate->add_option("--mutable", o.n_mutable, "number of mutable variables");
  generate->add_option("--edge-prob", o.edge_prob, "arc probability per vertex pair");
  generate->add_option("--seed", o.seed, "rng seed");
  generate->add_option("--max-domain", o.max_domain, "largest variable domain for scm");
  generate->add_option("--out", o.out_path, "write the result here instead of stdout");

  CLI::App* counter = app.add_subcommand("counterexample", "Model where fewer features win");
  counter->add_option("--out", o.out_path, "write the result here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (recover->parsed()) run_recover(o, out);
    else if (select->parsed()) run_select(o, out);
    else if (discover->parsed()) run_discover(o, out);
    else if (complexity->parsed()) run_complexity(o, out);
    else if (generate->parsed()) run_generate(o, out);
    else if (counter->parsed()) run_counterexample(o, out);
    return 0;
  } catch (const InputError& e) {
    emit_error(err, "input", e.what());
    return 2;
  } catch (const CapError& e) {
    emit_error(err, "cap", e.what());
    return 3;
  } catch (const InvariantError& e) {
    emit_error(err, "invariant", e.what());
    return 4;
  }
}

}  // namespace stablesel
