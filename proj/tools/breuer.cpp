#include <cstdio>
#include <iostream>
#include <regex>
#include <string>

#include <CLI11.hpp>

#include "breuer/io.hpp"
#include "breuer/scenario.hpp"
#include "breuer/suites.hpp"

using namespace breuer;

namespace {

void emit(const Json& report, const std::string& out) {
  if (out.empty())
    std::cout << dump_json(report) << "\n";
  else
    write_json_file(out, report);
}

int cmd_run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<double> tol, bool slow, int jobs, bool timing) {
  Scenario s = load_scenario(path);
  RunOptions o;
  o.seed = seed;
  o.tol = tol;
  o.slow = slow;
  o.jobs = jobs;
  o.timing = timing;
  RunResult r = run_scenario(s, o);
  emit(r.report, out);
  const Json& sum = r.report["summary"];
  for (const auto& t : r.report["tasks"])
    std::fprintf(stderr, "[%s] task %d %s%s\n", t["status"].get<std::string>().c_str(), t["index"].get<int>(),
                 t["kind"].get<std::string>().c_str(),
                 t.contains("error") ? (": " + t["error"].get<std::string>()).c_str() : "");
  std::fprintf(stderr, "%s: %d passed, %d failed, %d errors, %d skipped\n", s.name.c_str(), sum["passed"].get<int>(),
               sum["failed"].get<int>(), sum["errors"].get<int>(), sum["skipped"].get<int>());
  return r.pass ? 0 : 1;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, bool slow, const std::string& out) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    std::fprintf(stderr, "unknown suite '%s' (%s)\n", suite.c_str(), list.c_str());
    return 2;
  }
  SuiteResult r = run_suite(suite, seed, slow);
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(to_json(c));
    std::fprintf(stderr, "[%s] %s  residual %.3e\n", c.pass ? "pass" : "FAIL", c.name.c_str(), c.residual);
  }
  Json rep{{"suite", suite}, {"tool_version", tool_version}, {"seed", seed}, {"slow", slow},
           {"checks", checks}, {"pass", r.pass()}};
  emit(rep, out);
  return r.pass() ? 0 : 1;
}

int cmd_pair(const std::string& mpath, const std::string& kpath, const std::string& levels, double tol,
             const std::string& out) {
  std::smatch mm;
  static const std::regex re(R"((\d+)\.\.(\d+))");
  if (!std::regex_match(levels, mm, re)) {
    std::fprintf(stderr, "--levels expects lo..hi, got '%s'\n", levels.c_str());
    return 2;
  }
  PairOptions o;
  o.level_lo = std::stoi(mm[1]);
  o.level_hi = std::stoi(mm[2]);
  o.tol = tol;
  AnyModule m = parse_module(read_json_file(mpath), mpath);
  KTheoryElement k = parse_ktheory(read_json_file(kpath), kpath);
  const TraceContext& ctx = std::visit([](const auto& x) -> const TraceContext& { return x.ctx; }, m);
  if (k.m.rows() != k.N * ctx.total_dim())
    throw ParseError(kpath + ": dimension " + std::to_string(k.m.rows()) + " does not match N * dim(module) = " +
                     std::to_string(k.N * ctx.total_dim()));
  RunResult r = pair_report(m, k, o);
  emit(r.report, out);
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breuer-Fredholm modules, cyclic cocycles and index pairings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  std::string scenario, out, suite = "all", mpath, kpath, levels = "0..6";
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int jobs = 1;
  bool slow = false, no_timing = false;

  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario, "scenario JSON")->required();
  run->add_option("--out", out, "report file (stdout if omitted)");
  auto* run_seed = run->add_option("--seed", seed, "override the scenario seed");
  auto* run_tol = run->add_option("--tol", tol, "override every task tolerance");
  run->add_flag("--slow", slow, "include slow tasks");
  run->add_option("--jobs", jobs, "parallel tasks")->check(CLI::PositiveNumber);
  run->add_flag("--no-timing", no_timing, "omit wall times from the report");

  auto* verify = app.add_subcommand("verify", "run a built-in property suite");
  verify->add_option("--suite", suite, "complex|cocycles|indices|transgressions|reduction|appendix|all")->required();
  verify->add_option("--seed", seed, "seed");
  verify->add_flag("--slow", slow, "include slow checks");
  verify->add_option("--out", out, "report file (stdout if omitted)");

  auto* pairc = app.add_subcommand("pair", "index pairings of one module with one K-theory element");
  pairc->add_option("--module", mpath, "module JSON")->required();
  pairc->add_option("--ktheory", kpath, "K-theory JSON")->required();
  pairc->add_option("--levels", levels, "lo..hi");
  pairc->add_option("--tol", tol, "agreement tolerance");
  pairc->add_option("--out", out, "report file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run)
      return cmd_run(scenario, out, *run_seed ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     *run_tol ? std::optional<double>(tol) : std::nullopt, slow, jobs, !no_timing);
    if (*verify) return cmd_verify(suite, seed, slow, out);
    if (*pairc) return cmd_pair(mpath, kpath, levels, tol, out);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
