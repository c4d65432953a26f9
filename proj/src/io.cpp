#include "breuer/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace breuer {

namespace {

std::string location(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void fail(const std::string& path, const std::string& what) { throw ParseError(path + ": " + what); }

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

void write_real(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += std::isnan(x) ? "\"nan\"" : (x > 0 ? "\"inf\"" : "\"-inf\"");
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void write(std::string& out, const Json& j, int indent, int depth) {
  auto nl = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(d * indent), ' ');
  };
  // arrays of scalars stay on one line
  auto flat = [](const Json& a) {
    for (const auto& x : a)
      if (x.is_structured() && !(x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number())) return false;
    return true;
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        nl(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      nl(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool one_line = flat(j);
      out += '[';
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += one_line ? ", " : ",";
        first = false;
        if (!one_line) nl(depth + 1);
        write(out, x, one_line ? -1 : indent, depth + 1);
      }
      if (!one_line) nl(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: write_real(out, j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": invalid JSON at " + location(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  out += '\n';
  return out;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot write file");
  out << dump_json(j);
}

Complex parse_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

Matrix parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) fail(path + "[0]", "expected a row array");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail(rp, "expected a row array");
    if (j[r].size() != cols)
      fail(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

TraceContext parse_context(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("blocks")) fail(path, "expected {\"blocks\": [[dim, weight], ...]}");
  const Json& b = j["blocks"];
  if (!b.is_array() || b.empty()) fail(path + ".blocks", "expected a non-empty array");
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::string bp = path + ".blocks[" + std::to_string(i) + "]";
    if (!b[i].is_array() || b[i].size() != 2) fail(bp, "expected [dim, weight]");
    blocks.push_back({integer(b[i][0], bp + "[0]"), number(b[i][1], bp + "[1]")});
  }
  try {
    return TraceContext(blocks);
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return {};
}

Grading parse_grading(const Json& j, int dim, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of +-1");
  if (static_cast<int>(j.size()) != dim)
    fail(path, "has " + std::to_string(j.size()) + " entries, expected " + std::to_string(dim));
  Grading g(dim);
  for (int i = 0; i < dim; ++i) g(i) = number(j[i], path + "[" + std::to_string(i) + "]");
  return g;
}

namespace {

void require_dim(const Matrix& m, int d, const std::string& path) {
  if (m.rows() != d || m.cols() != d)
    fail(path, "is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", context dimension is " +
                   std::to_string(d));
}

}  // namespace

Chain parse_chain(const Json& j, const TraceContext& ctx, const std::string& path) {
  if (!j.is_object() || !j.contains("level") || !j.contains("terms")) fail(path, "expected {\"level\", \"terms\"}");
  Chain c = Chain::zero(ctx, integer(j["level"], path + ".level"));
  if (c.level < 0) fail(path + ".level", "must be nonnegative");
  const Json& t = j["terms"];
  if (!t.is_array()) fail(path + ".terms", "expected an array");
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::string tp = path + ".terms[" + std::to_string(i) + "]";
    if (!t[i].contains("entries")) fail(tp, "missing entries");
    Term term;
    term.coeff = t[i].contains("coeff") ? parse_complex(t[i]["coeff"], tp + ".coeff") : Complex(1.0);
    const Json& e = t[i]["entries"];
    if (!e.is_array() || static_cast<int>(e.size()) != c.level + 1)
      fail(tp + ".entries", "expected " + std::to_string(c.level + 1) + " entries");
    for (std::size_t k = 0; k < e.size(); ++k) {
      std::string ep = tp + ".entries[" + std::to_string(k) + "]";
      term.entries.push_back(parse_matrix(e[k], ep));
      require_dim(term.entries.back(), ctx.total_dim(), ep);
    }
    c.terms.push_back(std::move(term));
  }
  return c;
}

QuadratureSpec parse_quadrature(const Json& j, const std::string& path) {
  QuadratureSpec q;
  if (j.is_null()) return q;
  if (!j.is_object()) fail(path, "expected {\"panels\", \"order\", \"cutoff\"}");
  if (j.contains("panels")) q.panels = integer(j["panels"], path + ".panels");
  if (j.contains("order")) q.order = integer(j["order"], path + ".order");
  if (j.contains("cutoff")) {
    const Json& c = j["cutoff"];
    if (c.is_string()) {
      if (c.get<std::string>() != "auto") fail(path + ".cutoff", "expected a number or \"auto\"");
      q.cutoff = 0;
    } else {
      q.cutoff = number(c, path + ".cutoff");
    }
  }
  if (q.panels < 1 || q.order < 1) fail(path, "panels and order must be positive");
  return q;
}

AnyModule parse_module(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a module object");
  if (!j.contains("ctx")) fail(path, "missing ctx");
  TraceContext ctx = parse_context(j["ctx"], path + ".ctx");
  const int d = ctx.total_dim();
  std::optional<Grading> g;
  if (j.contains("grading") && !j["grading"].is_null()) g = parse_grading(j["grading"], d, path + ".grading");
  std::vector<Matrix> gens;
  if (j.contains("generators")) {
    if (!j["generators"].is_array()) fail(path + ".generators", "expected an array");
    for (std::size_t i = 0; i < j["generators"].size(); ++i) {
      std::string gp = path + ".generators[" + std::to_string(i) + "]";
      gens.push_back(parse_matrix(j["generators"][i], gp));
      require_dim(gens.back(), d, gp);
    }
  }
  const bool hasD = j.contains("D"), hasF = j.contains("F");
  if (hasD == hasF) fail(path, "exactly one of D or F is required");
  Matrix op = parse_matrix(hasD ? j["D"] : j["F"], path + (hasD ? ".D" : ".F"));
  require_dim(op, d, path + (hasD ? ".D" : ".F"));
  if (hasD) return UnboundedModule{ctx, gens, op, g};
  return BoundedModule{ctx, gens, op, g};
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const TraceContext& ctx) {
  Json b = Json::array();
  for (const auto& x : ctx.blocks()) b.push_back(Json::array({x.dim, x.weight}));
  return Json{{"blocks", b}};
}

Json to_json(const Chain& c) {
  Json terms = Json::array();
  for (const auto& t : c.terms) {
    Json e = Json::array();
    for (const auto& m : t.entries) e.push_back(to_json(m));
    terms.push_back(Json{{"coeff", to_json(t.coeff)}, {"entries", e}});
  }
  return Json{{"level", c.level}, {"terms", terms}};
}

namespace {

template <class M>
Json module_json(const M& m, const char* key, const Matrix& op) {
  Json j{{"ctx", to_json(m.ctx)}, {key, to_json(op)}};
  if (m.grading) {
    Json g = Json::array();
    for (int i = 0; i < m.grading->size(); ++i) g.push_back((*m.grading)(i));
    j["grading"] = g;
  }
  Json gens = Json::array();
  for (const auto& a : m.generators) gens.push_back(to_json(a));
  j["generators"] = gens;
  return j;
}

}  // namespace

Json to_json(const UnboundedModule& m) { return module_json(m, "D", m.D); }
Json to_json(const BoundedModule& m) { return module_json(m, "F", m.F); }

Json to_json(const CheckReport& r) {
  Json j{{"name", r.name}, {"pass", r.pass}, {"residual", r.residual}, {"scale", r.scale}, {"tolerance", r.tolerance}};
  if (r.has_slope) j["slope"] = r.slope;
  if (!r.values.empty()) {
    Json v = Json::object();
    for (const auto& [k, x] : r.values) v[k] = x;
    j["values"] = v;
  }
  return j;
}

Json to_json(const IndexReport& r) {
  Json j{{"method", to_string(r.method)}, {"value", r.value}};
  if (!r.diagnostics.empty()) {
    Json d = Json::object();
    for (const auto& [k, x] : r.diagnostics) d[k] = x;
    j["diagnostics"] = d;
  }
  return j;
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  Json j{{"pass", r.pass}, {"checks", checks}};
  if (!r.values.empty()) {
    Json v = Json::object();
    for (const auto& [k, x] : r.values) v[k] = x;
    j["values"] = v;
  }
  return j;
}

}  // namespace breuer
