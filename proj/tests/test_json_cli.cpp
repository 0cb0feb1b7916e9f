#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "stablesel/cli.hpp"
#include "stablesel/error.hpp"
#include "stablesel/json_io.hpp"
#include "stablesel/minimax.hpp"

using namespace stablesel;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "stablesel_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  auto path = scratch_dir() / name;
  std::ofstream f(path);
  f << text;
  return path.string();
}

std::string eleven_problem_path() {
  oracle::Problem p = oracle::eleven_class_problem();
  return write_file("eleven.json", problem_to_json(p.graph, p.spec).dump());
}

std::string counterexample_path() {
  return write_file("counter.json", scm_to_json(counterexample_scm()).dump());
}

std::string capture_subprocess(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  pclose(pipe);
  return out;
}

}  // namespace

TEST_CASE("twelve digit rounding is stable and tight") {
  CHECK(round12(0.5) == 0.5);
  CHECK(round12(0.001247751001) == 0.001247751001);
  double third = 1.0 / 3.0;
  double r = round12(third);
  CHECK(r == doctest::Approx(third).epsilon(1e-11));
  CHECK(round12(r) == r);
  CHECK(round12(0.0) == 0.0);
  CHECK(round12(-2.75) == -2.75);
}

TEST_CASE("graph and problem json round trips") {
  oracle::Problem p = oracle::eleven_class_problem();
  Json j = problem_to_json(p.graph, p.spec);
  auto [g2, spec2] = problem_from_json(j);
  CHECK(problem_to_json(g2, spec2).dump() == j.dump());
  CHECK(g2.edges().size() == p.graph.edges().size());
  CHECK(spec2.stable == p.spec.stable);

  Json plain = graph_to_json(p.graph);
  MixedGraph g3 = graph_from_json(plain);
  CHECK(graph_to_json(g3).dump() == plain.dump());

  SUBCASE("directed edges may omit their marks") {
    Json shorthand = parse_json_text(
        R"({"kind":"dag","vertices":["a","b"],"edges":[{"u":"a","v":"b"}]})");
    MixedGraph g = graph_from_json(shorthand);
    CHECK(g.children("a") == std::set<std::string>{"b"});
  }
}

TEST_CASE("scm json round trip preserves the risks") {
  DiscreteScm scm = counterexample_scm();
  Json j = scm_to_json(scm);
  DiscreteScm back = scm_from_json(j);
  CHECK(scm_to_json(back).dump() == j.dump());
  CHECK(worst_case_risk(back, {"X_s"}).risk ==
        doctest::Approx(worst_case_risk(scm, {"X_s"}).risk).epsilon(1e-12));
  CHECK(back.environments == scm.environments);
}

TEST_CASE("parsing failures raise input errors") {
  CHECK_THROWS_AS(parse_json_text("{oops"), InputError);
  CHECK_THROWS_AS(load_json_file("/nonexistent/file.json"), InputError);
  CHECK_THROWS_AS(graph_from_json(parse_json_text(R"({"kind":"dag"})")), InputError);
  CHECK_THROWS_AS(
      graph_from_json(parse_json_text(
          R"({"kind":"pag","vertices":["a"],"edges":[]})")),
      InputError);
  CHECK_THROWS_AS(
      graph_from_json(parse_json_text(
          R"({"kind":"dag","vertices":["a","b"],"edges":[{"u":"a","v":"b","mark_u":"circle"}]})")),
      InputError);
  CHECK_THROWS_AS(
      problem_from_json(parse_json_text(
          R"({"kind":"dag","vertices":["Y","a"],"edges":[],"target":"Y","stable":["a"]})")),
      InputError);  // mutable list missing
  Json scm_j = scm_to_json(counterexample_scm());
  scm_j.erase("domains");
  CHECK_THROWS_AS(scm_from_json(scm_j), InputError);
}

TEST_CASE("report serializers expose the documented keys") {
  oracle::Problem p = oracle::eleven_class_problem();
  Partition part = recover_classes(p.graph, p.spec);
  Json pj = partition_to_json(part, false);
  CHECK(pj["n_g"] == 11);
  CHECK(pj["nodes"] == 15);
  REQUIRE(pj["classes"].is_array());
  CHECK(pj["classes"][0]["size"] == 2);
  CHECK(pj["classes"][0]["members"].is_null());
  Json pj2 = partition_to_json(part, true);
  CHECK(pj2["classes"][0]["members"].is_array());

  DiscreteScm scm = counterexample_scm();
  Json wj = worst_case_to_json(worst_case_risk(scm, {"X_s"}));
  CHECK(wj.contains("risk"));
  CHECK(wj["policy_count"] == 4);
  CHECK(wj["argmax"]["X_m"] == Json::array({1, 0}));

  Json sj = selection_to_json(select_optimal_subset(scm));
  for (const char* key : {"chosen", "reason", "risks_computed", "ranking", "condition"})
    CHECK(sj.contains(key));
  CHECK(sj["condition"]["holds"] == false);
}

TEST_CASE("cli recover") {
  std::string path = eleven_problem_path();
  CliRun r = run({"recover", "--graph", path});
  REQUIRE(r.code == 0);
  Json j = parse_json_text(r.out);
  CHECK(j["n_g"] == 11);
  CHECK(j["nodes"] == 15);
  CHECK(j["classes"].size() == 11);
  CHECK(j["classes"][0]["members"].is_null());

  CliRun rb = run({"recover", "--graph", path, "--brute-force", "--members"});
  REQUIRE(rb.code == 0);
  Json jb = parse_json_text(rb.out);
  CHECK(jb["n_g"] == 11);
  CHECK(jb["nodes"] == 0);
  CHECK(jb["classes"][0]["members"].size() == 2);

  auto out_path = scratch_dir() / "part.json";
  CliRun rf = run({"recover", "--graph", path, "--out", out_path.string()});
  REQUIRE(rf.code == 0);
  CHECK(rf.out.empty());
  CHECK(load_json_file(out_path.string())["n_g"] == 11);
}

TEST_CASE("cli select and counterexample") {
  std::string path = counterexample_path();
  CliRun r = run({"select", "--scm", path});
  REQUIRE(r.code == 0);
  Json j = parse_json_text(r.out);
  CHECK(j["chosen"] == Json::array());
  CHECK(j["reason"] == "risk-minimization");
  CHECK(j["risks_computed"] == true);
  CHECK(j["ranking"][0]["risk"] == 0.000999);
  CHECK(j["condition"]["xm0"] == Json::array({"X_m"}));

  CliRun c = run({"counterexample"});
  REQUIRE(c.code == 0);
  Json cj = parse_json_text(c.out);
  CHECK(cj["risk_stable"] == 0.001247751001);
  CHECK(cj["risk_empty"] == 0.000999);
  CHECK(cj["strictly_greater"] == true);
  CHECK(cj["chosen"] == Json::array());
  CHECK(cj["scm"].contains("graph"));
}

TEST_CASE("cli discover in both modes") {
  oracle::Problem p = oracle::condition_fails_problem();
  std::string path = write_file("fails.json", problem_to_json(p.graph, p.spec).dump());
  CliRun r = run({"discover", "--input", path});
  REQUIRE(r.code == 0);
  Json j = parse_json_text(r.out);
  CHECK(j["condition_holds"] == false);
  CHECK(j["xm0"] == Json::array({"X_M"}));
  CHECK(j["w"] == Json::array({"X_1"}));
  CHECK(j["mutable"] == Json::array({"X_M"}));
  CHECK(j["descendants"]["X_M"] == Json::array({"X_1"}));
  CHECK(j["parents"]["X_M"] == Json::array({"Y"}));
  CHECK(j["queries"].get<long long>() > 0);

  SUBCASE("csv input runs the data oracle") {
    std::ostringstream csv;
    csv << "env,A,Y\n";
    for (int e = 0; e < 2; ++e)
      for (int a = 0; a < 2; ++a)
        for (int y = 0; y < 2; ++y)
          for (int k = 0; k < 100; ++k)
            csv << (e == 0 ? "e1" : "e2") << ',' << a << ',' << y << '\n';
    std::string data = write_file("flat.csv", csv.str());
    CliRun rc = run({"discover", "--input", data});
    REQUIRE(rc.code == 0);
    Json jc = parse_json_text(rc.out);
    CHECK(jc["mutable"] == Json::array());
    CHECK(jc["skeleton"] == Json::array());
    CHECK(jc["condition_holds"] == true);
  }
  SUBCASE("oracle flag rejects csv input") {
    std::string data = write_file("flat2.csv", "env,A,Y\ne1,0,1\n");
    CliRun rc = run({"discover", "--input", data, "--oracle"});
    CHECK(rc.code == 2);
    Json ej = parse_json_text(rc.err);
    CHECK(ej["error"]["type"] == "input");
  }
}

TEST_CASE("cli complexity") {
  std::string path = eleven_problem_path();
  CliRun r = run({"complexity", "--graph", path, "--certify"});
  REQUIRE(r.code == 0);
  Json j = parse_json_text(r.out);
  CHECK(j["f"] == 8);
  CHECK(j["n"] == 11);
  CHECK(j["bound_verdict"] == "holds");
  CHECK(j["d_ge3"] == 1);
  CHECK(j["is_tree"] == false);
  CHECK(j["chains"].is_array());
  CHECK(j["leaves"].contains("leaf_count"));

  CliRun rn = run({"complexity", "--graph", path});
  Json jn = parse_json_text(rn.out);
  CHECK(jn["n"].is_null());
  CHECK(jn["bound_verdict"] == "not-checked");

  CliRun rs = run({"complexity", "--sweep", "chain", "--max-d", "4"});
  REQUIRE(rs.code == 0);
  Json js = parse_json_text(rs.out);
  REQUIRE(js.is_array());
  REQUIRE(js.size() == 4);
  CHECK(js[3]["d"] == 4);
  CHECK(js[3]["f"] == 5);
  CHECK(js[3]["n"] == 5);
  CHECK(js[3]["bound_verdict"] == "holds");

  CliRun rc = run({"complexity", "--sweep", "circle", "--max-d", "5"});
  Json jc = parse_json_text(rc.out);
  REQUIRE(jc.size() == 3);  // circles start at d = 3
  CHECK(jc[2]["d"] == 5);
  CHECK(jc[2]["f"] == 16);

  CHECK(run({"complexity"}).code == 2);
  CHECK(run({"complexity", "--sweep", "square"}).code == 2);
  CHECK(run({"complexity", "--sweep", "chain", "--max-d", "-2"}).code == 2);
  CHECK(run({"complexity", "--sweep", "chain", "--max-d", "0"}).code == 2);
}

TEST_CASE("cli generate is deterministic per seed") {
  CliRun a = run({"generate", "--kind", "graph", "--seed", "5"});
  CliRun b = run({"generate", "--kind", "graph", "--seed", "5"});
  CliRun c = run({"generate", "--kind", "graph", "--seed", "6"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  auto [g, spec] = problem_from_json(parse_json_text(a.out));
  CHECK(spec.stable.size() == 4);
  CHECK(spec.mutable_vars.size() == 1);

  CliRun t = run({"generate", "--kind", "tree", "--stable", "5"});
  Json tj = parse_json_text(t.out);
  CHECK(tj["mutable"] == Json::array());
  CHECK(tj["edges"].size() == 5);  // spanning tree over six vertices

  CliRun s = run({"generate", "--kind", "scm", "--stable", "2", "--mutable", "1", "--seed", "3"});
  REQUIRE(s.code == 0);
  DiscreteScm scm = scm_from_json(parse_json_text(s.out));
  CHECK(scm.spec.stable.size() == 2);

  CHECK(run({"generate", "--kind", "widget"}).code == 2);
}

TEST_CASE("cli exit codes and error envelopes") {
  CHECK(run({}).code == 2);
  CHECK(run({"unknown"}).code == 2);
  CHECK(run({"recover"}).code == 2);  // --graph required

  CliRun help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("stablesel") != std::string::npos);

  CliRun missing = run({"recover", "--graph", "/nonexistent/p.json"});
  CHECK(missing.code == 2);
  Json mj = parse_json_text(missing.err);
  CHECK(mj["error"]["type"] == "input");
  CHECK(mj["error"]["message"].get<std::string>().find("cannot read") != std::string::npos);

  CliRun capped = run({"select", "--scm", counterexample_path(), "--cap-policies", "1"});
  CHECK(capped.code == 3);
  Json cj = parse_json_text(capped.err);
  CHECK(cj["error"]["type"] == "cap");
}

TEST_CASE("installed binary matches the in-process output") {
  std::string binary = STABLESEL_CLI_PATH;
  REQUIRE(std::filesystem::exists(binary));
  std::string cmd = binary + " generate --kind graph --seed 9";
  std::string first = capture_subprocess(cmd);
  std::string second = capture_subprocess(cmd);
  CHECK(first == second);
  CliRun inproc = run({"generate", "--kind", "graph", "--seed", "9"});
  CHECK(first == inproc.out);
}
