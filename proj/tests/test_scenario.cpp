#include <doctest.h>

#include <cmath>
#include <string>

#include "breuer/io.hpp"
#include "breuer/scenario.hpp"

using namespace breuer;

namespace {

std::string scenario(const std::string& name) { return std::string(BREUER_SCENARIO_DIR) + "/" + name; }

RunResult run_file(const std::string& name, int jobs = 2) {
  RunOptions o;
  o.jobs = jobs;
  o.timing = false;
  return run_scenario(load_scenario(scenario(name)), o);
}

const Json& task(const RunResult& r, int i) { return r.report["tasks"][i]; }

}  // namespace

TEST_CASE("fractional scenario: every even-index method gives 1/3") {
  RunResult r = run_file("type2_fractional.json");
  CHECK(r.pass);
  const Json& idx = task(r, 2);
  REQUIRE(idx["kind"] == "index_even");
  CHECK(idx["result"]["doubled"] == true);
  int count = 0;
  for (const auto& [name, m] : idx["result"]["methods"].items()) {
    CHECK(std::abs(m["value"].get<double>() - 1.0 / 3) <= 1e-8);
    ++count;
  }
  CHECK(count >= 8);
}

TEST_CASE("Type I and odd scenarios pass") {
  CHECK(run_file("type1.json").pass);
  CHECK(run_file("odd.json").pass);
}

TEST_CASE("non-invertible module: task-level error, batch continues") {
  RunResult r = run_file("non_invertible.json");
  CHECK_FALSE(r.pass);
  CHECK(task(r, 0)["status"] == "pass");
  CHECK(task(r, 1)["status"] == "error");
  CHECK(task(r, 1)["error"].get<std::string>().find("invertible") != std::string::npos);
  CHECK(task(r, 2)["status"] == "pass");
  CHECK(r.report["summary"]["errors"] == 1);
}

TEST_CASE("slow tasks are skipped by default") {
  RunResult r = run_file("type1.json");
  const Json& last = r.report["tasks"].back();
  CHECK(last["kind"] == "d_alpha_transgression");
  CHECK(last["status"] == "skipped");
}

TEST_CASE("reports do not depend on the number of jobs") {
  std::string a = dump_json(run_file("odd.json", 1).report);
  std::string b = dump_json(run_file("odd.json", 4).report);
  CHECK(a == b);
}

TEST_CASE("seed override changes task seeds and digests") {
  Scenario s = load_scenario(scenario("odd.json"));
  RunOptions o;
  o.timing = false;
  RunResult a = run_scenario(s, o);
  o.seed = 999;
  RunResult b = run_scenario(s, o);
  CHECK(a.report["tasks"][3]["seed"] != b.report["tasks"][3]["seed"]);
  CHECK(a.report["tasks"][3]["digest"] != b.report["tasks"][3]["digest"]);
  CHECK(b.report["seed"] == 999);
}

TEST_CASE("tolerance override reaches expected-value comparisons") {
  Scenario s = load_scenario(scenario("type1.json"));
  s.tasks[4].expected = Complex(1.0 + 1e-6, 0.0);
  RunOptions o;
  o.timing = false;
  CHECK(run_scenario(s, o).report["tasks"][4]["status"] == "fail");
  o.tol = 1e-5;
  CHECK(run_scenario(s, o).report["tasks"][4]["status"] == "pass");
}

TEST_CASE("pair report") {
  AnyModule m = parse_module(read_json_file(scenario("pair/type1_module.json")), "m");
  KTheoryElement k = parse_ktheory(read_json_file(scenario("pair/type1_ktheory.json")), "k");
  RunResult r = pair_report(m, k, PairOptions{0, 6, 1e-8});
  CHECK(r.pass);
  CHECK(r.report["reference"].get<double>() == doctest::Approx(1.0));
  CHECK(r.report["levels"].size() == 4);
  for (const auto& lv : r.report["levels"]) CHECK(lv["jlo_within_tail"] == true);
}

TEST_CASE("digest is FNV-1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
