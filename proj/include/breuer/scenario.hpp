#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "breuer/io.hpp"
#include "breuer/suites.hpp"

namespace breuer {

inline constexpr const char* tool_version = "0.3.0";

struct KTheoryElement {
  enum class Kind { projection, unitary } kind = Kind::projection;
  Matrix m;
  int N = 1;
};

struct Task {
  std::string kind;
  Json params;
  std::optional<Complex> expected;
  std::string provenance;
  double tol = 1e-8;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  Json modules;  // raw specs, constructions resolved per task
  std::map<std::string, KTheoryElement> ktheory;
  std::vector<Task> tasks;
};

const std::vector<std::string>& task_kinds();

Scenario parse_scenario(const Json& j, const std::string& origin);
Scenario load_scenario(const std::string& path);
KTheoryElement parse_ktheory(const Json& j, const std::string& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool slow = false;
  int jobs = 1;
  bool timing = true;
};

struct RunResult {
  Json report;
  bool pass = false;
};

RunResult run_scenario(const Scenario& s, const RunOptions& o);

// resolve a named module of the scenario, applying constructions
AnyModule resolve_module(const Scenario& s, const std::string& name);

struct PairOptions {
  int level_lo = 0;
  int level_hi = 6;
  double tol = 1e-8;
};

RunResult pair_report(const AnyModule& m, const KTheoryElement& k, const PairOptions& o);

std::string fnv1a_hex(const std::string& s);

}  // namespace breuer
