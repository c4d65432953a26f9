#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "breuer/checks.hpp"
#include "breuer/suites.hpp"

using namespace breuer;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<CheckReport> checks;
  double seconds = 0;
  double budget = 0;  // 0: no runtime limit of its own
};

template <class F>
Criterion timed(int id, std::string title, double budget, F f) {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c{id, std::move(title), f(), 0, budget};
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

bool passed(const Criterion& c) {
  if (c.budget > 0 && c.seconds > c.budget) return false;
  for (const auto& r : c.checks)
    if (!r.pass) return false;
  return !c.checks.empty();
}

std::vector<CheckReport> select(const std::vector<CheckReport>& v, bool d_alpha) {
  std::vector<CheckReport> out;
  for (const auto& r : v)
    if ((r.name.rfind("d_alpha", 0) == 0) == d_alpha) out.push_back(r);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  auto start = std::chrono::steady_clock::now();
  std::vector<Criterion> all;
  all.push_back(timed(1, "bicomplex identities", 10, [&] { return suite_complex(seed); }));
  all.push_back(timed(2, "heat-bracket oracle equivalence", 60, [&] {
    std::vector<CheckReport> v{bracket_agreement_check(50, seed)};
    return v;
  }));
  all.push_back(timed(3, "JLO cocycle", 0, [&] { return suite_cocycles(seed); }));
  all.push_back(timed(4, "Connes cocycle and degree shift", 0, [&] { return suite_connes(seed); }));
  all.push_back(timed(5, "index consistency", 0, [&] { return suite_indices(seed); }));
  all.push_back(timed(6, "reduction theorem", 0, [&] { return suite_reduction(seed); }));
  std::vector<CheckReport> trans;
  Criterion c7 = timed(7, "transgression identities", 0, [&] {
    trans = suite_transgressions(seed, true);
    auto v = select(trans, false);
    auto lem = suite_brackets(seed);
    for (auto& r : lem)
      if (r.name.rfind("lemma", 0) == 0) v.push_back(r);
    return v;
  });
  all.push_back(c7);
  all.push_back(timed(8, "Getzler bound", 0, [&] { return suite_getzler(seed); }));
  all.push_back(timed(9, "appendix suite", 0, [&] { return suite_appendix(seed); }));
  all.push_back(timed(10, "doubling and alpha = 1 endpoint", 0, [&] {
    auto v = suite_doubling(seed, true);
    for (auto& r : select(trans, true)) v.push_back(r);
    return v;
  }));

  bool ok = true;
  for (const auto& c : all) {
    bool p = passed(c);
    ok = ok && p;
    std::printf("criterion %d: %s  %s (%zu checks, %.1f s)\n", c.id, p ? "PASS" : "FAIL", c.title.c_str(), c.checks.size(),
                c.seconds);
    for (const auto& r : c.checks) {
      std::printf("    [%s] %-40s residual %.3e", r.pass ? "ok" : "!!", r.name.c_str(), r.residual);
      if (r.has_slope) std::printf("  slope %.3f", r.slope);
      auto v = r.values.find("violations");
      auto n = r.values.find("instances");
      if (v != r.values.end() && n != r.values.end()) std::printf("  violations %g/%g", v->second, n->second);
      std::printf("\n");
    }
    if (c.budget > 0 && c.seconds > c.budget) std::printf("    runtime %.1f s over the %.0f s budget\n", c.seconds, c.budget);
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("total %.1f s\n", total);
  return ok ? 0 : 1;
}
