#include "breuer/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <set>

#include "breuer/random.hpp"

namespace breuer {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ParseError(path + ": " + what); }

const Json* find(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string str_param(const Json& j, const char* key, const std::string& path, std::optional<std::string> def = {}) {
  const Json* v = find(j, key);
  if (!v) {
    if (def) return *def;
    fail(path, std::string("missing '") + key + "'");
  }
  if (!v->is_string()) fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

double real_param(const Json& j, const char* key, const std::string& path, std::optional<double> def = {}) {
  const Json* v = find(j, key);
  if (!v) {
    if (def) return *def;
    fail(path, std::string("missing '") + key + "'");
  }
  if (!v->is_number()) fail(path + "." + key, "expected a number");
  return v->get<double>();
}

int int_param(const Json& j, const char* key, const std::string& path, std::optional<int> def = {}) {
  const Json* v = find(j, key);
  if (!v) {
    if (def) return *def;
    fail(path, std::string("missing '") + key + "'");
  }
  if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
  return v->get<int>();
}


std::vector<int> int_list(const Json& j, const char* key, const std::string& path, std::vector<int> def) {
  const Json* v = find(j, key);
  if (!v) return def;
  if (v->is_number_integer()) return {v->get<int>()};
  if (!v->is_array()) fail(path + "." + key, "expected an integer or a list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number_integer()) fail(path + "." + key + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back((*v)[i].get<int>());
  }
  return out;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

const std::set<std::string> constructions{"double", "to_bounded", "d_alpha"};

// dimension of a named module without building it
int module_dim(const Json& modules, const std::string& name, const std::string& path, int depth = 0) {
  if (depth > 32) fail(path, "construction chain too deep (cycle?)");
  auto it = modules.find(name);
  if (it == modules.end()) fail(path, "unknown module '" + name + "'");
  const Json& spec = *it;
  if (find(spec, "from")) {
    int d = module_dim(modules, spec["from"].get<std::string>(), "modules." + name + ".from", depth + 1);
    return spec["construct"].get<std::string>() == "double" ? 2 * d : d;
  }
  return parse_context(spec["ctx"], "modules." + name + ".ctx").total_dim();
}

std::string base_name(const std::string& ref) {
  auto k = ref.find('[');
  return k == std::string::npos ? ref : ref.substr(0, k);
}

void check_module_spec(const Json& modules, const std::string& name, const Json& spec) {
  const std::string path = "modules." + name;
  if (!spec.is_object()) fail(path, "expected an object");
  if (const Json* from = find(spec, "from")) {
    if (!from->is_string()) fail(path + ".from", "expected a module name");
    if (!modules.contains(from->get<std::string>())) fail(path + ".from", "unknown module '" + from->get<std::string>() + "'");
    std::string c = str_param(spec, "construct", path);
    if (!constructions.count(c)) fail(path + ".construct", "unknown construction '" + c + "' (double, to_bounded, d_alpha)");
    if (c == "d_alpha") {
      const Json* a = find(spec, "alpha");
      if (!a) fail(path, "d_alpha needs 'alpha' (a number or a list)");
      if (!a->is_number() && !a->is_array()) fail(path + ".alpha", "expected a number or a list of numbers");
      if (a->is_array())
        for (std::size_t i = 0; i < a->size(); ++i)
          if (!(*a)[i].is_number()) fail(path + ".alpha[" + std::to_string(i) + "]", "expected a number");
    }
    return;
  }
  parse_module(spec, path);
}

}  // namespace

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& task_kinds() {
  static const std::vector<std::string> k{
      "validate",        "index_even",        "index_odd", "heat_bracket", "character",
      "jlo_cocycle",     "connes_cocycle",    "jlo_v_identity",  "jlo_vw_identity",    "duhamel",
      "cobound",         "connes_transgression", "reduction", "d_alpha_transgression", "getzler",
      "bracket_agreement", "bicomplex",       "lemma",     "doubling",     "d_alpha_endpoint",
      "suite"};
  return k;
}

KTheoryElement parse_ktheory(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object with 'projection' or 'unitary'");
  KTheoryElement k;
  const bool P = j.contains("projection"), U = j.contains("unitary");
  if (P == U) fail(path, "exactly one of 'projection' or 'unitary' is required");
  k.kind = P ? KTheoryElement::Kind::projection : KTheoryElement::Kind::unitary;
  k.m = parse_matrix(P ? j["projection"] : j["unitary"], path + (P ? ".projection" : ".unitary"));
  if (k.m.rows() != k.m.cols()) fail(path, "matrix must be square");
  k.N = int_param(j, "N", path, 1);
  if (k.N < 1) fail(path + ".N", "must be positive");
  return k;
}

Scenario parse_scenario(const Json& j, const std::string& origin) {
  if (!j.is_object()) fail(origin, "expected a scenario object");
  Scenario s;
  s.name = str_param(j, "name", origin, "unnamed");
  if (const Json* seed = find(j, "seed")) {
    if (!seed->is_number_unsigned() && !seed->is_number_integer()) fail(origin + ".seed", "expected an integer");
    s.seed = seed->get<std::uint64_t>();
  }
  s.modules = Json::object();
  if (const Json* mods = find(j, "modules")) {
    if (!mods->is_object()) fail("modules", "expected an object of named modules");
    s.modules = *mods;
    for (const auto& [name, spec] : mods->items()) check_module_spec(s.modules, name, spec);
    for (const auto& [name, spec] : mods->items()) module_dim(s.modules, name, "modules." + name);
  }
  if (const Json* kt = find(j, "ktheory")) {
    if (!kt->is_object()) fail("ktheory", "expected an object of named elements");
    for (const auto& [name, spec] : kt->items()) s.ktheory[name] = parse_ktheory(spec, "ktheory." + name);
  }
  const Json* tasks = find(j, "tasks");
  if (!tasks || !tasks->is_array()) fail(origin, "missing 'tasks' array");
  for (std::size_t i = 0; i < tasks->size(); ++i) {
    const std::string path = "tasks[" + std::to_string(i) + "]";
    const Json& t = (*tasks)[i];
    if (!t.is_object()) fail(path, "expected an object");
    Task task;
    task.kind = str_param(t, "kind", path);
    const auto& kinds = task_kinds();
    if (std::find(kinds.begin(), kinds.end(), task.kind) == kinds.end()) {
      std::string list;
      for (const auto& k : kinds) list += (list.empty() ? "" : ", ") + k;
      fail(path + ".kind", "unknown task kind '" + task.kind + "'; valid kinds: " + list);
    }
    task.params = t;
    if (const Json* e = find(t, "expected")) {
      task.expected = parse_complex(*e, path + ".expected");
      task.provenance = str_param(t, "provenance", path + " (expected values need a provenance string)");
    }
    task.tol = real_param(t, "tol", path, 1e-8);
    int mdim = -1;
    if (const Json* m = find(t, "module")) {
      if (!m->is_string()) fail(path + ".module", "expected a module name");
      mdim = module_dim(s.modules, base_name(m->get<std::string>()), path + ".module");
    }
    if (const Json* k = find(t, "ktheory")) {
      if (!k->is_string()) fail(path + ".ktheory", "expected a K-theory element name");
      auto it = s.ktheory.find(k->get<std::string>());
      if (it == s.ktheory.end()) fail(path + ".ktheory", "unknown K-theory element '" + k->get<std::string>() + "'");
      if (mdim >= 0 && it->second.m.rows() != it->second.N * mdim)
        fail("ktheory." + it->first, "dimension " + std::to_string(it->second.m.rows()) + " does not match N * dim(" +
                                         t["module"].get<std::string>() + ") = " + std::to_string(it->second.N * mdim));
    }
    s.tasks.push_back(std::move(task));
  }
  return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_json_file(path), path); }

AnyModule resolve_module(const Scenario& s, const std::string& ref) {
  std::string name = base_name(ref);
  auto it = s.modules.find(name);
  if (it == s.modules.end()) throw ParameterError("unknown module '" + ref + "'");
  const Json& spec = *it;
  if (!find(spec, "from")) return parse_module(spec, "modules." + name);
  AnyModule src = resolve_module(s, spec["from"].get<std::string>());
  const UnboundedModule* u = std::get_if<UnboundedModule>(&src);
  const std::string c = spec["construct"].get<std::string>();
  if (!u) throw ParameterError("modules." + name + ": construction '" + c + "' needs an unbounded source module");
  if (c == "double") return double_module(*u);
  if (c == "to_bounded") return to_bounded(*u);
  // d_alpha: a scalar alpha, or a list indexed as name[i]
  const Json& a = spec["alpha"];
  double alpha = 0;
  if (a.is_number()) {
    alpha = a.get<double>();
  } else {
    auto k = ref.find('[');
    if (k == std::string::npos) throw ParameterError("module '" + name + "' has an alpha list; reference it as " + name + "[i]");
    std::size_t idx = std::stoul(ref.substr(k + 1));
    if (idx >= a.size()) throw ParameterError("module '" + ref + "': alpha index out of range");
    alpha = a[idx].get<double>();
  }
  UnboundedModule out = *u;
  out.D = d_alpha(*u, alpha);
  return out;
}

namespace {

struct TaskContext {
  const Scenario& s;
  const Task& task;
  std::uint64_t seed;
  double tol;
  bool slow;
  std::string path;
};

struct Outcome {
  Json result = Json::object();
  bool pass = true;
  bool skipped = false;
};

UnboundedModule need_unbounded(const TaskContext& tc) {
  AnyModule m = resolve_module(tc.s, str_param(tc.task.params, "module", tc.path));
  if (auto* u = std::get_if<UnboundedModule>(&m)) return *u;
  throw ParameterError(tc.path + ": task '" + tc.task.kind + "' needs an unbounded module");
}

BoundedModule need_bounded(const TaskContext& tc) {
  AnyModule m = resolve_module(tc.s, str_param(tc.task.params, "module", tc.path));
  if (auto* b = std::get_if<BoundedModule>(&m)) return *b;
  return to_bounded(std::get<UnboundedModule>(m));
}

const KTheoryElement& need_ktheory(const TaskContext& tc, KTheoryElement::Kind kind) {
  std::string name = str_param(tc.task.params, "ktheory", tc.path);
  const KTheoryElement& k = tc.s.ktheory.at(name);
  if (k.kind != kind)
    throw ParameterError(tc.path + ": task '" + tc.task.kind + "' needs a " +
                         (kind == KTheoryElement::Kind::projection ? "projection" : "unitary"));
  return k;
}

std::vector<int> default_levels(bool graded, std::vector<int> even, std::vector<int> odd) { return graded ? even : odd; }

// random perturbation of the right parity
Matrix random_perturbation(const TraceContext& ctx, const std::optional<Grading>& g, Rng& rng) {
  return g ? random_odd_hermitian(ctx, *g, rng) : random_hermitian(ctx, rng);
}

Matrix matrix_or_random(const TaskContext& tc, const char* key, const TraceContext& ctx, const std::optional<Grading>& g,
                        Rng& rng) {
  if (const Json* v = find(tc.task.params, key)) {
    Matrix m = parse_matrix(*v, tc.path + "." + key);
    if (m.rows() != ctx.total_dim() || m.cols() != ctx.total_dim())
      fail(tc.path + "." + key, "dimension does not match the module");
    return m;
  }
  return random_perturbation(ctx, g, rng);
}

// graded: a_0 even, odd slots paired up so the supertrace can be nonzero
std::vector<Matrix> random_factors(const UnboundedModule& m, int n, bool with_parity, Rng& rng) {
  std::vector<Matrix> f;
  for (int i = 0; i < n; ++i) {
    bool odd = i > 0 && i <= 2 * ((n - 1) / 2);
    if (m.grading && with_parity)
      f.push_back(odd ? random_odd_hermitian(m.ctx, *m.grading, rng) : random_even(m.ctx, *m.grading, rng));
    else
      f.push_back(random_affiliated(m.ctx, rng));
  }
  return f;
}

Outcome from_checks(const std::vector<CheckReport>& checks) {
  Outcome o;
  Json arr = Json::array();
  for (const auto& c : checks) {
    arr.push_back(to_json(c));
    o.pass = o.pass && c.pass;
  }
  o.result["checks"] = arr;
  return o;
}

void compare_expected(const TaskContext& tc, Outcome& o, Complex value) {
  o.result["value"] = to_json(value);
  if (!tc.task.expected) return;
  double dev = std::abs(value - *tc.task.expected);
  o.result["deviation"] = dev;
  o.pass = o.pass && dev <= tc.tol * std::max(1.0, std::abs(*tc.task.expected));
}

BracketOptions bracket_options(const TaskContext& tc) {
  BracketOptions opt;
  std::string m = str_param(tc.task.params, "method", tc.path, "divided_difference");
  if (m == "divided_difference") opt.method = BracketMethod::divided_difference;
  else if (m == "nested_quadrature") opt.method = BracketMethod::nested_quadrature;
  else if (m == "monte_carlo") opt.method = BracketMethod::monte_carlo;
  else fail(tc.path + ".method", "unknown method '" + m + "' (divided_difference, nested_quadrature, monte_carlo)");
  opt.seed = tc.seed;
  opt.samples = int_param(tc.task.params, "samples", tc.path, 100000);
  opt.level_cap = int_param(tc.task.params, "level_cap", tc.path, 6);
  return opt;
}

Json index_json(const IndexComparison& c) {
  Json methods = Json::object();
  for (const auto& [name, r] : c.methods) methods[name] = to_json(r);
  return Json{{"methods", methods}, {"reference", c.reference}, {"max_deviation", c.max_deviation}};
}

Outcome task_validate(const TaskContext& tc) {
  AnyModule m = resolve_module(tc.s, str_param(tc.task.params, "module", tc.path));
  std::vector<double> ps;
  if (const Json* v = find(tc.task.params, "p_values"))
    for (const auto& x : *v) ps.push_back(x.get<double>());
  ValidationReport r = std::visit([&](const auto& mm) { return validate(mm, ps); }, m);
  Outcome o;
  o.result = to_json(r);
  o.pass = r.pass;
  return o;
}

Outcome task_index_even(const TaskContext& tc) {
  const auto& k = need_ktheory(tc, KTheoryElement::Kind::projection);
  AnyModule m = resolve_module(tc.s, str_param(tc.task.params, "module", tc.path));
  IndexOptions io;
  io.level = int_param(tc.task.params, "level", tc.path, 6);
  io.tol = tc.tol;
  if (tc.task.expected) io.expected = tc.task.expected->real();
  IndexComparison c;
  if (auto* u = std::get_if<UnboundedModule>(&m)) {
    const Json* d = find(tc.task.params, "double");
    bool dbl;
    if (!d || (d->is_string() && d->get<std::string>() == "auto")) {
      try {
        require_invertible(inflate(*u, k.N));
        dbl = false;
      } catch (const InvertibilityError&) {
        dbl = true;
      }
    } else if (d->is_boolean()) {
      dbl = d->get<bool>();
    } else {
      fail(tc.path + ".double", "expected true, false or \"auto\"");
    }
    io.double_module = dbl;
    c = compare_even_indices(*u, k.m, k.N, io);
  } else {
    c = compare_even_indices(std::get<BoundedModule>(m), k.m, k.N, io);
  }
  Outcome o;
  o.result = index_json(c);
  o.result["doubled"] = io.double_module;
  o.pass = c.pass;
  return o;
}

Outcome task_index_odd(const TaskContext& tc) {
  const auto& k = need_ktheory(tc, KTheoryElement::Kind::unitary);
  UnboundedModule m = need_unbounded(tc);
  IndexOptions io;
  io.level = int_param(tc.task.params, "level", tc.path, 5);
  io.tol = tc.tol;
  if (tc.task.expected) io.expected = tc.task.expected->real();
  IndexComparison c = compare_odd_indices(m, k.m, k.N, io);
  Outcome o;
  o.result = index_json(c);
  o.pass = c.pass;
  return o;
}

Outcome task_heat_bracket(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  const Json* f = find(tc.task.params, "factors");
  if (!f || !f->is_array() || f->empty()) fail(tc.path, "heat_bracket needs a non-empty 'factors' list");
  HeatBracketRequest req{m.ctx, m.D, m.grading, {}, real_param(tc.task.params, "t", tc.path, 1.0), bracket_options(tc)};
  for (std::size_t i = 0; i < f->size(); ++i) {
    std::string p = tc.path + ".factors[" + std::to_string(i) + "]";
    req.factors.push_back(parse_matrix((*f)[i], p));
    if (req.factors.back().rows() != m.ctx.total_dim()) fail(p, "dimension does not match the module");
  }
  Outcome o;
  compare_expected(tc, o, heat_bracket(req));
  return o;
}

// pairs a character with a chain given inline or with a Chern character
Outcome task_character(const TaskContext& tc) {
  const Json& P = tc.task.params;
  std::string which = str_param(P, "cochain", tc.path);
  AnyModule am = resolve_module(tc.s, str_param(P, "module", tc.path));
  TraceContext ctx = std::visit([](const auto& m) { return m.ctx; }, am);
  std::vector<Chain> chains;
  int N = 1;
  if (const Json* c = find(P, "chain")) {
    chains.push_back(parse_chain(*c, ctx, tc.path + ".chain"));
  } else {
    const auto& k = tc.s.ktheory.at(str_param(P, "ktheory", tc.path + " (needs 'chain' or 'ktheory')"));
    N = k.N;
    int level = int_param(P, "level", tc.path);
    TraceContext big = ctx.inflate(N);
    if (k.kind == KTheoryElement::Kind::projection) {
      if (level % 2) fail(tc.path + ".level", "a projection pairs at even levels");
      chains.push_back(chern_plus(big, k.m, level / 2)[level / 2]);
    } else {
      if (level % 2 == 0) fail(tc.path + ".level", "a unitary pairs at odd levels");
      chains.push_back(chern_minus(big, k.m, level / 2)[level / 2]);
    }
  }
  const int n = chains[0].level;
  Complex v;
  if (which == "connes") {
    BoundedModule b = std::holds_alternative<BoundedModule>(am) ? std::get<BoundedModule>(am)
                                                                 : to_bounded(std::get<UnboundedModule>(am));
    v = pair(connes_cochain(inflate(b, N), n), chains[0]);
  } else if (which == "jlo" || which == "jlo_limit") {
    auto* u = std::get_if<UnboundedModule>(&am);
    if (!u) throw ParameterError(tc.path + ": cochain '" + which + "' needs an unbounded module");
    UnboundedModule mN = inflate(*u, N);
    if (which == "jlo") {
      v = pair(jlo_cochain(mN, n), chains[0]);
    } else {
      QuadratureSpec q;
      if (const Json* qj = find(P, "quadrature")) q = parse_quadrature(*qj, tc.path + ".quadrature");
      LimitDiagnostics d;
      v = pair(jlo_limit(mN, n, q, {}, &d), chains[0]);
      return [&] {
        Outcome o;
        compare_expected(tc, o, v);
        o.result["cutoff"] = d.cutoff;
        o.result["tail_bound"] = d.tail_bound;
        return o;
      }();
    }
  } else {
    fail(tc.path + ".cochain", "unknown cochain '" + which + "' (connes, jlo, jlo_limit)");
  }
  Outcome o;
  o.result["level"] = n;
  compare_expected(tc, o, v);
  return o;
}

Outcome task_jlo_cocycle(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  int count = int_param(tc.task.params, "chains", tc.path, 3);
  std::vector<CheckReport> out;
  for (int n : int_list(tc.task.params, "levels", tc.path, default_levels(bool(m.grading), {0, 2}, {1}))) {
    auto c = random_chains(m.ctx, n + 1, count, tc.seed + n, m.grading);
    CheckReport r = jlo_cocycle_check(m, n, c);
    r.name = "jlo_cocycle_n" + std::to_string(n);
    out.push_back(r);
  }
  return from_checks(out);
}

Outcome task_connes_cocycle(const TaskContext& tc) {
  BoundedModule m = need_bounded(tc);
  int count = int_param(tc.task.params, "chains", tc.path, 10);
  std::vector<CheckReport> out;
  for (int n : int_list(tc.task.params, "levels", tc.path, default_levels(bool(m.grading), {0, 2}, {1, 3}))) {
    CheckReport r = connes_cocycle_check(m, n, random_chains(m.ctx, n, count, tc.seed + n, m.grading),
                                         random_chains(m.ctx, n + 2, count, tc.seed + n + 50, m.grading));
    r.name = "connes_cocycle_n" + std::to_string(n);
    out.push_back(r);
  }
  return from_checks(out);
}

Outcome task_jlo_v_identity(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  Rng rng(tc.seed);
  Matrix V = matrix_or_random(tc, "V", m.ctx, m.grading, rng);
  int count = int_param(tc.task.params, "chains", tc.path, 2);
  std::vector<CheckReport> out;
  for (int n : int_list(tc.task.params, "levels", tc.path, default_levels(bool(m.grading), {0, 2}, {1, 3}))) {
    CheckReport r = jlo_v_identity_check(m, V, random_chains(m.ctx, n, count, tc.seed + n, m.grading));
    r.name = "jlo_v_identity_n" + std::to_string(n);
    out.push_back(r);
  }
  return from_checks(out);
}

Outcome task_jlo_vw_identity(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  Rng rng(tc.seed);
  Matrix V = matrix_or_random(tc, "V", m.ctx, m.grading, rng);
  Matrix W = matrix_or_random(tc, "W", m.ctx, m.grading, rng);
  int count = int_param(tc.task.params, "chains", tc.path, 1);
  std::vector<CheckReport> out;
  for (int n : int_list(tc.task.params, "levels", tc.path, default_levels(bool(m.grading), {1, 3}, {0, 2}))) {
    CheckReport r = jlo_vw_identity_check(m, V, W, random_chains(m.ctx, n, count, tc.seed + 5 + n, m.grading));
    r.name = "jlo_vw_identity_n" + std::to_string(n);
    out.push_back(r);
  }
  return from_checks(out);
}

std::vector<double> steps(const TaskContext& tc, std::vector<double> def) {
  const Json* v = find(tc.task.params, "h");
  if (!v) return def;
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) fail(tc.path + ".h[" + std::to_string(i) + "]", "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  if (out.size() < 2) fail(tc.path + ".h", "need at least two step sizes");
  return out;
}

Outcome task_duhamel(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  Rng rng(tc.seed);
  Matrix V = matrix_or_random(tc, "V", m.ctx, m.grading, rng);
  int n = int_param(tc.task.params, "factors", tc.path, 3);
  std::vector<Matrix> f = random_factors(m, n, true, rng);
  CheckReport r = duhamel_check(m.ctx, m.D, V, m.grading, f, steps(tc, {1e-2, 1e-3}));
  r.name = "duhamel";
  return from_checks({r});
}

Outcome task_cobound(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  Rng rng(tc.seed);
  Matrix V = matrix_or_random(tc, "V", m.ctx, m.grading, rng);
  int n = int_param(tc.task.params, "level", tc.path, m.grading ? 2 : 1);
  CheckReport r = cobound_check(m, V, random_chains(m.ctx, n, 1, tc.seed + 1, m.grading)[0], steps(tc, {1e-2, 1e-3}));
  r.name = "cobound_n" + std::to_string(n);
  return from_checks({r});
}

Outcome task_connes_transgression(const TaskContext& tc) {
  BoundedModule m = need_bounded(tc);
  Rng rng(tc.seed);
  Matrix H;
  if (const Json* h = find(tc.task.params, "H")) {
    H = parse_matrix(*h, tc.path + ".H");
  } else if (m.grading) {
    H = random_even(m.ctx, *m.grading, rng);
    H = (H + H.adjoint()).eval() / 2.0;
  } else {
    H = random_hermitian(m.ctx, rng);
  }
  int n = int_param(tc.task.params, "level", tc.path, m.grading ? 2 : 1);
  CheckReport r = connes_transgression_check(m, H, n, random_chains(m.ctx, n, 1, tc.seed + 1, m.grading)[0],
                                             steps(tc, {1e-2, 1e-3}));
  r.name = "connes_transgression_n" + std::to_string(n);
  return from_checks({r});
}

Outcome task_reduction(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  QuadratureSpec q;
  if (const Json* qj = find(tc.task.params, "quadrature")) q = parse_quadrature(*qj, tc.path + ".quadrature");
  int count = int_param(tc.task.params, "chains", tc.path, 2);
  std::vector<CheckReport> out;
  for (int n : int_list(tc.task.params, "levels", tc.path, default_levels(bool(m.grading), {0, 2}, {1, 3}))) {
    CheckReport r = reduction_check(m, n, random_chains(m.ctx, n, count, tc.seed + n, m.grading), q);
    r.name = "reduction_n" + std::to_string(n);
    out.push_back(r);
  }
  return from_checks(out);
}

Outcome task_d_alpha_transgression(const TaskContext& tc) {
  if (!tc.slow) {
    Outcome o;
    o.skipped = true;
    o.result["reason"] = "slow task; rerun with --slow";
    return o;
  }
  UnboundedModule m = need_unbounded(tc);
  int n = int_param(tc.task.params, "level", tc.path, m.grading ? 2 : 1);
  int cl = int_param(tc.task.params, "chain_level", tc.path, n);
  double alpha = real_param(tc.task.params, "alpha", tc.path, 0.5);
  double t = real_param(tc.task.params, "t", tc.path, 1.0);
  CheckReport r = d_alpha_transgression_check(m, n, alpha, t, random_chains(m.ctx, cl, 1, tc.seed + 1, m.grading)[0],
                                              steps(tc, {1e-2, 5e-3}));
  r.name = "d_alpha_transgression_n" + std::to_string(n);
  return from_checks({r});
}

Outcome task_lemma(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  LemmaVariant v = lemma_variant_from(str_param(tc.task.params, "variant", tc.path));
  int n = int_param(tc.task.params, "factors", tc.path, 4);
  int j = int_param(tc.task.params, "j", tc.path, 1);
  Rng rng(tc.seed);
  std::vector<Matrix> f = random_factors(m, n, v != LemmaVariant::bracket_D2, rng);
  return from_checks({lemma_misc_check(m.ctx, m.D, m.grading, f, v, j)});
}

Outcome task_doubling(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  const auto& k = need_ktheory(tc, KTheoryElement::Kind::projection);
  UnboundedModule mN = inflate(m, k.N);
  double before = mckean_singer(mN, k.m, 1, 1.0).value;
  UnboundedModule d = double_module(mN);
  Matrix pd = double_projection(mN.ctx, k.m);
  double after_k = pairing_even_bounded(to_bounded(d), pd, 1).value;
  double after_ms = mckean_singer(d, pd, 1, 1.0).value;
  Outcome o;
  o.result = Json{{"before_mckean_singer", before}, {"after_kernel", after_k}, {"after_mckean_singer", after_ms}};
  double dev = std::max(std::abs(before - after_k), std::abs(before - after_ms));
  o.result["max_deviation"] = dev;
  o.pass = dev <= tc.tol;
  if (tc.task.expected) {
    double e = std::abs(before - tc.task.expected->real());
    o.result["deviation"] = e;
    o.pass = o.pass && e <= tc.tol;
  }
  return o;
}

Outcome task_d_alpha_endpoint(const TaskContext& tc) {
  UnboundedModule m = need_unbounded(tc);
  double e = (d_alpha(m, 1.0) - to_bounded(m).F).norm();
  Outcome o;
  o.result["residual"] = e;
  o.pass = e <= 1e-12;
  return o;
}

Outcome task_suite(const TaskContext& tc) {
  SuiteResult r = run_suite(str_param(tc.task.params, "suite", tc.path), tc.seed, tc.slow);
  return from_checks(r.checks);
}

Outcome dispatch(const TaskContext& tc) {
  const std::string& k = tc.task.kind;
  const Json& P = tc.task.params;
  if (k == "validate") return task_validate(tc);
  if (k == "index_even") return task_index_even(tc);
  if (k == "index_odd") return task_index_odd(tc);
  if (k == "heat_bracket") return task_heat_bracket(tc);
  if (k == "character") return task_character(tc);
  if (k == "jlo_cocycle") return task_jlo_cocycle(tc);
  if (k == "connes_cocycle") return task_connes_cocycle(tc);
  if (k == "jlo_v_identity") return task_jlo_v_identity(tc);
  if (k == "jlo_vw_identity") return task_jlo_vw_identity(tc);
  if (k == "duhamel") return task_duhamel(tc);
  if (k == "cobound") return task_cobound(tc);
  if (k == "connes_transgression") return task_connes_transgression(tc);
  if (k == "reduction") return task_reduction(tc);
  if (k == "d_alpha_transgression") return task_d_alpha_transgression(tc);
  if (k == "getzler")
    return from_checks({getzler_check(int_param(P, "instances", tc.path, 50), tc.seed, real_param(P, "delta", tc.path, 0.05),
                                      real_param(P, "eps", tc.path, 0.1))});
  if (k == "bracket_agreement")
    return from_checks({bracket_agreement_check(int_param(P, "instances", tc.path, 50), tc.seed,
                                                int_param(P, "samples", tc.path, 100000))});
  if (k == "bicomplex")
    return from_checks(
        {complex_identities_check(int_param(P, "chains", tc.path, 100), int_param(P, "cochains", tc.path, 10), tc.seed)});
  if (k == "lemma") return task_lemma(tc);
  if (k == "doubling") return task_doubling(tc);
  if (k == "d_alpha_endpoint") return task_d_alpha_endpoint(tc);
  if (k == "suite") return task_suite(tc);
  throw ParameterError("unknown task kind '" + k + "'");
}

Json task_inputs(const Scenario& s, const Task& t, std::uint64_t seed) {
  Json in = Json::object();
  in["params"] = t.params;
  in["seed"] = seed;
  if (t.params.contains("module")) {
    Json mods = Json::object();
    std::string name = base_name(t.params["module"].get<std::string>());
    for (int depth = 0; depth < 32 && s.modules.contains(name); ++depth) {
      mods[name] = s.modules[name];
      if (!s.modules[name].contains("from")) break;
      name = s.modules[name]["from"].get<std::string>();
    }
    in["modules"] = mods;
  }
  if (t.params.contains("ktheory")) {
    const auto& k = s.ktheory.at(t.params["ktheory"].get<std::string>());
    in["ktheory"] = Json{{k.kind == KTheoryElement::Kind::projection ? "projection" : "unitary", to_json(k.m)}, {"N", k.N}};
  }
  return in;
}

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& o) {
  const std::uint64_t seed = o.seed ? *o.seed : s.seed;
  const std::size_t n = s.tasks.size();
  std::vector<Json> reports(n);
  std::vector<double> seconds(n, 0.0);
  std::vector<int> status(n, 0);  // 0 pass, 1 fail, 2 error, 3 skipped

  auto run_one = [&](std::size_t i) {
    const Task& t = s.tasks[i];
    const std::uint64_t ts = splitmix(seed ^ splitmix(i + 1));
    const double tol = o.tol ? *o.tol : t.tol;
    TaskContext tc{s, t, ts, tol, o.slow, "tasks[" + std::to_string(i) + "]"};
    Json inputs = task_inputs(s, t, ts);
    Json r = Json::object();
    r["index"] = i;
    r["kind"] = t.kind;
    r["digest"] = fnv1a_hex(dump_json(inputs, 0) + std::string(tool_version));
    r["seed"] = ts;
    r["tol"] = tol;
    if (t.expected) {
      r["expected"] = to_json(*t.expected);
      r["provenance"] = t.provenance;
    }
    auto start = std::chrono::steady_clock::now();
    try {
      Outcome out = dispatch(tc);
      status[i] = out.skipped ? 3 : out.pass ? 0 : 1;
      r["result"] = out.result;
    } catch (const std::exception& e) {
      status[i] = 2;
      r["error"] = e.what();
    }
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    static const char* names[] = {"pass", "fail", "error", "skipped"};
    r["status"] = names[status[i]];
    r["inputs"] = inputs;
    reports[i] = std::move(r);
  };

  const int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (int w = 0; w < jobs; ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) run_one(i);
    }));
  for (auto& w : workers) w.get();

  int counts[4] = {0, 0, 0, 0};
  for (int st : status) ++counts[st];
  RunResult res;
  res.pass = counts[1] == 0 && counts[2] == 0;
  Json rep = Json::object();
  rep["scenario"] = s.name;
  rep["tool_version"] = tool_version;
  rep["seed"] = seed;
  rep["slow"] = o.slow;
  if (o.tol) rep["tol_override"] = *o.tol;
  Json tasks = Json::array();
  for (auto& r : reports) tasks.push_back(std::move(r));
  rep["tasks"] = tasks;
  rep["summary"] = Json{{"tasks", n},         {"passed", counts[0]}, {"failed", counts[1]},
                        {"errors", counts[2]}, {"skipped", counts[3]}, {"pass", res.pass}};
  if (o.timing) {
    Json tm = Json::array();
    for (std::size_t i = 0; i < n; ++i) tm.push_back(Json{{"index", i}, {"seconds", seconds[i]}});
    rep["timing"] = Json{{"jobs", jobs}, {"tasks", tm}};
  }
  res.report = std::move(rep);
  return res;
}

RunResult pair_report(const AnyModule& am, const KTheoryElement& k, const PairOptions& o) {
  if (o.level_lo < 0 || o.level_hi < o.level_lo) throw ParameterError("levels must satisfy 0 <= lo <= hi");
  const bool even = k.kind == KTheoryElement::Kind::projection;
  Json levels = Json::array();
  Json errors = Json::array();
  bool pass = true;
  std::optional<double> reference;
  Json methods = Json::object();
  const int N = k.N;

  auto note_error = [&](const std::string& what, const std::exception& e) {
    errors.push_back(Json{{"method", what}, {"error", e.what()}});
    pass = false;
  };

  const UnboundedModule* um = std::get_if<UnboundedModule>(&am);
  std::optional<BoundedModule> bm;
  bool doubled = false;
  Matrix kb = k.m;
  try {
    if (um) {
      try {
        bm = to_bounded(inflate(*um, N));
      } catch (const InvertibilityError&) {
        if (!even) throw;
        UnboundedModule d = double_module(inflate(*um, N));
        bm = to_bounded(d);
        kb = double_projection(inflate(*um, N).ctx, k.m);
        doubled = true;
      }
    } else {
      bm = inflate(std::get<BoundedModule>(am), N);
    }
  } catch (const std::exception& e) {
    note_error("to_bounded", e);
  }

  if (bm) {
    try {
      IndexReport r = even ? pairing_even_bounded(*bm, kb, 1) : pairing_odd_bounded(*bm, kb, 1);
      methods["kernel"] = to_json(r);
      reference = r.value;
    } catch (const std::exception& e) {
      note_error("kernel", e);
    }
  }
  if (um && even) {
    try {
      methods["mckean_singer_t1.0"] = to_json(mckean_singer(*um, k.m, N, 1.0));
      if (!reference) reference = methods["mckean_singer_t1.0"]["value"].get<double>();
    } catch (const std::exception& e) {
      note_error("mckean_singer", e);
    }
  }

  for (int n = o.level_lo; n <= o.level_hi; ++n) {
    if ((n % 2 == 0) != even) continue;
    Json lv = Json::object();
    lv["level"] = n;
    if (bm) {
      try {
        IndexReport r = even ? connes_pairing_even(*bm, kb, 1, n) : connes_pairing_odd(*bm, kb, 1, n);
        lv["connes"] = to_json(r);
        if (reference && std::abs(r.value - *reference) > o.tol) pass = false;
      } catch (const std::exception& e) {
        note_error("connes_n" + std::to_string(n), e);
      }
    }
    if (um) {
      try {
        IndexReport r = even ? jlo_pairing_even(*um, k.m, N, n) : jlo_pairing_odd(*um, k.m, N, n);
        lv["jlo"] = to_json(r);
        double tail = r.diagnostics.count("tail_bound") ? r.diagnostics.at("tail_bound") : 0.0;
        bool ok = !reference || std::abs(r.value - *reference) <= tail + o.tol;
        lv["jlo_within_tail"] = ok;
        pass = pass && ok;
      } catch (const std::exception& e) {
        note_error("jlo_n" + std::to_string(n), e);
      }
    }
    levels.push_back(lv);
  }

  RunResult res;
  Json rep = Json::object();
  rep["tool_version"] = tool_version;
  rep["kind"] = even ? "even" : "odd";
  rep["N"] = N;
  rep["doubled"] = doubled;
  rep["tol"] = o.tol;
  rep["index_methods"] = methods;
  if (reference) rep["reference"] = *reference;
  rep["levels"] = levels;
  if (!errors.empty()) rep["errors"] = errors;
  res.pass = pass && reference.has_value();
  rep["pass"] = res.pass;
  res.report = std::move(rep);
  return res;
}

}  // namespace breuer
