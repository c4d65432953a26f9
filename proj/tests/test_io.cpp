#include <doctest.h>

#include <cmath>
#include <string>

#include "breuer/io.hpp"
#include "breuer/scenario.hpp"

using namespace breuer;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

Json minimal() {
  return parse_json_text(R"({
    "name": "minimal",
    "modules": {"M": {"ctx": {"blocks": [[2, 1.0]]},
                      "D": [[[0,0],[1,0]],[[1,0],[0,0]]],
                      "grading": [1, -1],
                      "generators": [[[[1,0],[0,0]],[[0,0],[0,0]]]]}},
    "ktheory": {"p": {"projection": [[[1,0],[0,0]],[[0,0],[0,0]]]}},
    "tasks": [{"kind": "validate", "module": "M"}]
  })", "minimal");
}

}  // namespace

TEST_CASE("reals keep 17 significant digits") {
  Json j = Json::array({1.0 / 3, 0.1});
  std::string s = dump_json(j, 0);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(parse_json_text(s, "t")[0].get<double>() == 1.0 / 3);
}

TEST_CASE("matrix round trip") {
  Matrix m(2, 2);
  m << Complex(1, 2), 0.5, Complex(0, -1), 1.0 / 7;
  Matrix back = parse_matrix(parse_json_text(dump_json(to_json(m)), "t"), "m");
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("row length mismatch names the row") {
  std::string e = error_of([] { parse_matrix(parse_json_text("[[[1,0],[0,0]],[[1,0]]]", "t"), "modules.M.D"); });
  CHECK(e.find("modules.M.D[1]") != std::string::npos);
}

TEST_CASE("invalid JSON reports line and column") {
  std::string e = error_of([] { parse_json_text("{\n  \"a\": [1,\n  }", "file.json"); });
  CHECK(e.find("file.json") != std::string::npos);
  CHECK(e.find("line 3") != std::string::npos);
}

TEST_CASE("module parsing") {
  AnyModule m = parse_module(minimal()["modules"]["M"], "M");
  CHECK(std::holds_alternative<UnboundedModule>(m));
  Json both = minimal()["modules"]["M"];
  both["F"] = both["D"];
  CHECK(error_of([&] { parse_module(both, "M"); }).find("exactly one of D or F") != std::string::npos);
  Json wrong = minimal()["modules"]["M"];
  wrong["grading"] = Json::array({1, -1, 1});
  CHECK(error_of([&] { parse_module(wrong, "M"); }).find("M.grading") != std::string::npos);
}

TEST_CASE("chain and quadrature parsing") {
  TraceContext ctx({{2, 1.0}});
  Json c = parse_json_text(R"({"level": 1, "terms": [{"coeff": [2, 0], "entries": [
      [[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[1,0]],[[1,0],[0,0]]]]}]})", "c");
  Chain ch = parse_chain(c, ctx, "chain");
  CHECK(ch.level == 1);
  CHECK(ch.terms.size() == 1);
  c["level"] = 2;
  CHECK(error_of([&] { parse_chain(c, ctx, "chain"); }).find("chain") != std::string::npos);
  QuadratureSpec q = parse_quadrature(parse_json_text(R"({"panels": 8, "order": 12, "cutoff": "auto"})", "q"), "q");
  CHECK(q.panels == 8);
  CHECK(q.cutoff == 0.0);
  CHECK(parse_quadrature(parse_json_text(R"({"cutoff": 9.5})", "q"), "q").cutoff == 9.5);
}

TEST_CASE("minimal scenario loads") {
  Scenario s = parse_scenario(minimal(), "minimal");
  CHECK(s.name == "minimal");
  CHECK(s.tasks.size() == 1);
  CHECK(s.ktheory.at("p").N == 1);
}

TEST_CASE("unknown task kind lists valid kinds") {
  Json j = minimal();
  j["tasks"][0]["kind"] = "frobnicate";
  std::string e = error_of([&] { parse_scenario(j, "s"); });
  CHECK(e.find("frobnicate") != std::string::npos);
  CHECK(e.find("index_even") != std::string::npos);
  CHECK(e.find("jlo_cocycle") != std::string::npos);
}

TEST_CASE("scenario dimension and reference errors carry field paths") {
  Json j = minimal();
  j["tasks"][0] = Json{{"kind", "index_even"}, {"module", "M"}, {"ktheory", "p"}};
  j["ktheory"]["p"]["N"] = 2;
  CHECK(error_of([&] { parse_scenario(j, "s"); }).find("ktheory.p") != std::string::npos);
  Json k = minimal();
  k["tasks"][0]["module"] = "Nope";
  CHECK(error_of([&] { parse_scenario(k, "s"); }).find("tasks[0].module") != std::string::npos);
  Json r = minimal();
  r["modules"]["M"]["D"][1] = Json::array({Json::array({1, 0})});
  CHECK(error_of([&] { parse_scenario(r, "s"); }).find("modules.M.D[1]") != std::string::npos);
}

TEST_CASE("expected values need provenance") {
  Json j = minimal();
  j["tasks"][0]["expected"] = 1.0;
  CHECK(error_of([&] { parse_scenario(j, "s"); }).find("provenance") != std::string::npos);
  j["tasks"][0]["provenance"] = "arithmetic";
  CHECK_NOTHROW(parse_scenario(j, "s"));
}

TEST_CASE("construction checks") {
  Json j = minimal();
  j["modules"]["B"] = Json{{"from", "M"}, {"construct", "squash"}};
  CHECK(error_of([&] { parse_scenario(j, "s"); }).find("modules.B.construct") != std::string::npos);
  j["modules"]["B"] = Json{{"from", "X"}, {"construct", "double"}};
  CHECK(error_of([&] { parse_scenario(j, "s"); }).find("modules.B.from") != std::string::npos);
}
