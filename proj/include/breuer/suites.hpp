#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "breuer/checks.hpp"

namespace breuer {

// Worked examples shared by scenarios, verify suites and the acceptance binary.
struct LibraryModule {
  std::string name;
  UnboundedModule module;
  std::optional<Matrix> p;  // in the inflated basis
  std::optional<Matrix> u;
  int N = 1;
  double expected = 0;
  bool needs_double = false;
};

LibraryModule type1_example();
LibraryModule type2_fractional_example();
LibraryModule odd_example();
UnboundedModule random_graded_module(std::uint64_t seed, int half = 2, double min_abs = 0.5);
UnboundedModule random_ungraded_module(std::uint64_t seed, int dim = 3, double min_abs = 0.5);
std::vector<LibraryModule> scenario_library();

struct IndexComparison {
  std::vector<std::pair<std::string, IndexReport>> methods;
  double reference = 0;
  double max_deviation = 0;  // after subtracting the JLO tail
  bool pass = false;
};

struct IndexOptions {
  int level = 6;
  bool double_module = false;
  double tol = 1e-8;
  std::optional<double> expected;
  std::vector<double> ms_times{0.5, 1.0, 2.0};
  std::vector<int> parametrix_powers{1, 3};
};

// kernel = parametrix = McKean-Singer = Connes pairing = truncated JLO pairing
IndexComparison compare_even_indices(const UnboundedModule& m, const Matrix& p, int N, const IndexOptions& o);
IndexComparison compare_even_indices(const BoundedModule& m, const Matrix& p, int N, const IndexOptions& o);
IndexComparison compare_odd_indices(const UnboundedModule& m, const Matrix& u, int N, const IndexOptions& o);

// straight path D -> u* D u, refined until every step is resolved
IndexReport spectral_flow_to_conjugate(const UnboundedModule& m, const Matrix& u);

struct SuiteResult {
  std::string suite;
  std::vector<CheckReport> checks;
  bool pass() const;
};

const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, std::uint64_t seed, bool slow);

// individual suites, also used by the acceptance binary
std::vector<CheckReport> suite_complex(std::uint64_t seed);
std::vector<CheckReport> suite_brackets(std::uint64_t seed);
std::vector<CheckReport> suite_cocycles(std::uint64_t seed);
std::vector<CheckReport> suite_connes(std::uint64_t seed);
std::vector<CheckReport> suite_indices(std::uint64_t seed);
std::vector<CheckReport> suite_transgressions(std::uint64_t seed, bool slow);
std::vector<CheckReport> suite_reduction(std::uint64_t seed);
std::vector<CheckReport> suite_getzler(std::uint64_t seed);
std::vector<CheckReport> suite_appendix(std::uint64_t seed);
std::vector<CheckReport> suite_doubling(std::uint64_t seed, bool slow);

}  // namespace breuer
