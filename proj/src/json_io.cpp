#include "stablesel/json_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stablesel/error.hpp"

namespace stablesel {

namespace {

const Json& need(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw InputError("missing field: " + key);
  return j.at(key);
}

std::string as_string(const Json& j, const std::string& what) {
  if (!j.is_string()) throw InputError(what + " must be a string");
  return j.get<std::string>();
}

int as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + " must be an integer");
  return j.get<int>();
}

double as_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  return j.get<double>();
}

std::vector<std::string> string_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  std::vector<std::string> out;
  for (const Json& x : j) out.push_back(as_string(x, what + " entry"));
  return out;
}

Mark mark_from(const std::string& s) {
  if (s == "tail") return Mark::tail;
  if (s == "arrow") return Mark::arrow;
  throw InputError("unknown mark: " + s);
}

const char* mark_name(Mark m) { return m == Mark::tail ? "tail" : "arrow"; }

Json set_to_json(const std::set<std::string>& s) { return Json(s); }

std::vector<std::vector<double>> rows_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const Json& r : j) {
    if (!r.is_array()) throw InputError(what + " rows must be arrays");
    std::vector<double> row;
    for (const Json& x : r) row.push_back(as_number(x, what + " entry"));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json rows_to(const std::vector<std::vector<double>>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json jr = Json::array();
    for (double x : r) jr.push_back(round12(x));
    out.push_back(std::move(jr));
  }
  return out;
}

Json pair_list(const std::vector<std::pair<std::string, std::string>>& ps) {
  Json out = Json::array();
  for (const auto& [u, v] : ps) out.push_back(Json::array({u, v}));
  return out;
}

}  // namespace

double round12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json parse_json_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("invalid json");
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

Json graph_to_json(const MixedGraph& g) {
  Json j;
  j["kind"] = g.kind() == GraphKind::dag ? "dag" : "mag";
  j["vertices"] = g.vertex_ids();
  Json edges = Json::array();
  for (const Edge& e : g.edges()) {
    Json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["mark_u"] = mark_name(e.mark_u);
    je["mark_v"] = mark_name(e.mark_v);
    edges.push_back(std::move(je));
  }
  j["edges"] = edges;
  return j;
}

MixedGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("graph must be a json object");
  GraphKind kind = GraphKind::dag;
  if (j.contains("kind")) {
    std::string k = as_string(j.at("kind"), "kind");
    if (k == "mag")
      kind = GraphKind::mag;
    else if (k != "dag")
      throw InputError("unknown graph kind: " + k);
  }
  std::vector<std::string> vertices = string_list(need(j, "vertices"), "vertices");
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    const Json& je = j.at("edges");
    if (!je.is_array()) throw InputError("edges must be an array");
    for (const Json& e : je) {
      Edge edge;
      edge.u = as_string(need(e, "u"), "edge endpoint");
      edge.v = as_string(need(e, "v"), "edge endpoint");
      // marks default to a directed edge u -> v
      if (e.contains("mark_u")) edge.mark_u = mark_from(as_string(e.at("mark_u"), "mark_u"));
      if (e.contains("mark_v")) edge.mark_v = mark_from(as_string(e.at("mark_v"), "mark_v"));
      edges.push_back(std::move(edge));
    }
  }
  return MixedGraph(kind, vertices, edges);
}

Json problem_to_json(const MixedGraph& g, const ProblemSpec& spec) {
  Json j = graph_to_json(g);
  j["target"] = spec.target;
  j["stable"] = set_to_json(spec.stable);
  j["mutable"] = set_to_json(spec.mutable_vars);
  return j;
}

std::pair<MixedGraph, ProblemSpec> problem_from_json(const Json& j) {
  MixedGraph g = graph_from_json(j);
  ProblemSpec spec;
  spec.target = as_string(need(j, "target"), "target");
  for (const std::string& s : string_list(need(j, "stable"), "stable"))
    spec.stable.insert(s);
  for (const std::string& s : string_list(need(j, "mutable"), "mutable"))
    spec.mutable_vars.insert(s);
  validate_spec(g, spec);
  return {std::move(g), std::move(spec)};
}

Json scm_to_json(const DiscreteScm& scm) {
  Json j;
  j["graph"] = problem_to_json(scm.graph, scm.spec);
  Json dom = Json::object();
  for (const auto& [v, d] : scm.domains) dom[v] = d;
  j["domains"] = dom;
  Json yv = Json::array();
  for (double x : scm.y_values) yv.push_back(round12(x));
  j["y_values"] = yv;
  Json cpt = Json::object();
  for (const auto& [v, rows] : scm.cpt) cpt[v] = rows_to(rows);
  j["cpt"] = cpt;
  Json mc = Json::object();
  for (const auto& [v, by_env] : scm.mutable_cpt) {
    Json envs = Json::object();
    for (const auto& [e, rows] : by_env) envs[e] = rows_to(rows);
    mc[v] = std::move(envs);
  }
  j["mutable_cpt"] = mc;
  j["environments"] = scm.environments;
  return j;
}

DiscreteScm scm_from_json(const Json& j) {
  auto [g, spec] = problem_from_json(need(j, "graph"));
  const Json& jd = need(j, "domains");
  if (!jd.is_object()) throw InputError("domains must be an object");
  std::map<std::string, int> domains;
  for (const auto& [key, value] : jd.items()) domains[key] = as_int(value, "domain of " + key);
  const Json& jy = need(j, "y_values");
  if (!jy.is_array()) throw InputError("y_values must be an array");
  std::vector<double> y_values;
  for (const Json& x : jy) y_values.push_back(as_number(x, "y_values entry"));
  const Json& jc = need(j, "cpt");
  if (!jc.is_object()) throw InputError("cpt must be an object");
  std::map<std::string, std::vector<std::vector<double>>> cpt;
  for (const auto& [key, value] : jc.items()) cpt[key] = rows_from(value, "cpt of " + key);
  const Json& jm = need(j, "mutable_cpt");
  if (!jm.is_object()) throw InputError("mutable_cpt must be an object");
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> mutable_cpt;
  for (const auto& [key, value] : jm.items()) {
    if (!value.is_object()) throw InputError("mutable_cpt of " + key + " must map environments");
    for (const auto& [env, rows] : value.items())
      mutable_cpt[key][env] = rows_from(rows, "mutable_cpt of " + key + " in " + env);
  }
  std::vector<std::string> environments = string_list(need(j, "environments"), "environments");
  return DiscreteScm(std::move(g), std::move(spec), std::move(domains), std::move(y_values),
                     std::move(cpt), std::move(mutable_cpt), std::move(environments));
}

Json partition_to_json(const Partition& p, bool with_members) {
  Json j;
  j["n_g"] = p.classes.size();
  j["nodes"] = p.nodes;
  Json cls = Json::array();
  for (const EquivalenceClass& c : p.classes) {
    Json jc;
    jc["representative"] = set_to_json(c.representative);
    jc["size"] = c.size();
    if (with_members) {
      Json ms = Json::array();
      for (const auto& m : c.members()) ms.push_back(set_to_json(m));
      jc["members"] = std::move(ms);
    } else {
      jc["members"] = nullptr;
    }
    cls.push_back(std::move(jc));
  }
  j["classes"] = cls;
  return j;
}

Json worst_case_to_json(const WorstCaseResult& r) {
  Json j;
  j["risk"] = round12(r.risk);
  j["policy_count"] = round12(r.policy_count);
  Json am = Json::object();
  for (const auto& [v, digits] : r.argmax) am[v] = digits;
  j["argmax"] = am;
  return j;
}

Json selection_to_json(const SubsetSelection& sel) {
  Json j;
  j["chosen"] = set_to_json(sel.chosen);
  j["reason"] = sel.reason;
  j["risks_computed"] = sel.risks_computed;
  Json rank = Json::array();
  for (const RankedRisk& r : sel.ranking) {
    Json jr;
    jr["representative"] = set_to_json(r.representative);
    jr["risk"] = round12(r.risk);
    rank.push_back(std::move(jr));
  }
  j["ranking"] = rank;
  Json cond;
  cond["holds"] = sel.condition.holds;
  cond["xm0"] = set_to_json(sel.condition.xm0);
  cond["w"] = set_to_json(sel.condition.w);
  cond["w2"] = set_to_json(sel.condition.w2);
  j["condition"] = cond;
  return j;
}

Json discovery_to_json(const DiscoveryResult& r) {
  Json j;
  j["target"] = r.target;
  j["variables"] = r.vars;
  j["mutable"] = set_to_json(r.mutable_vars);
  j["skeleton"] = pair_list(r.skeleton);
  j["xm0"] = set_to_json(r.xm0);
  j["closure"] = set_to_json(r.closure);
  j["w"] = set_to_json(r.w);
  j["condition_holds"] = r.condition_holds;
  Json desc = Json::object();
  for (const auto& [m, s] : r.descendants) desc[m] = set_to_json(s);
  j["descendants"] = desc;
  Json par = Json::object();
  for (const auto& [m, s] : r.parents) par[m] = set_to_json(s);
  j["parents"] = par;
  Json ors = Json::array();
  for (const auto& [u, v] : r.oriented) ors.push_back(Json::array({u, v}));
  j["oriented"] = ors;
  j["queries"] = r.queries;
  return j;
}

Json complexity_to_json(const ComplexityReport& r) {
  Json j;
  j["f"] = r.f;
  j["d_ge3"] = r.d_ge3;
  j["d_le2"] = r.d_le2;
  j["is_tree"] = r.is_tree;
  j["nodes"] = r.nodes;
  Json chains = Json::array();
  for (const ChainSummary& c : r.chains) {
    Json jc;
    jc["vertices"] = c.vertices;
    jc["heads"] = c.heads;
    jc["two_headed"] = c.two_headed;
    jc["y_adjacent"] = c.y_adjacent;
    jc["isolated"] = c.isolated;
    jc["removal_order"] = c.removal_order;
    jc["cost"] = c.cost;
    chains.push_back(std::move(jc));
  }
  j["chains"] = chains;
  if (r.n)
    j["n"] = *r.n;
  else
    j["n"] = nullptr;
  j["bound_verdict"] = r.bound_verdict;
  Json lv;
  lv["leaf_count"] = r.leaves.leaf_count;
  lv["branch_count"] = r.leaves.branch_count;
  lv["tree_lemma_applicable"] = r.leaves.tree_lemma_applicable;
  lv["tree_lemma_holds"] = r.leaves.tree_lemma_holds;
  lv["spanning_tree_leaves"] = r.leaves.spanning_tree_leaves;
  lv["spanning_check_ok"] = r.leaves.spanning_check_ok;
  j["leaves"] = lv;
  return j;
}

}  // namespace stablesel
