#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include <json.hpp>

#include "breuer/checks.hpp"
#include "breuer/fredholm.hpp"

namespace breuer {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);
Json parse_json_text(const std::string& text, const std::string& origin);
// reals with 17 significant digits, keys in insertion order
std::string dump_json(const Json& j, int indent = 2);
void write_json_file(const std::string& path, const Json& j);

Complex parse_complex(const Json& j, const std::string& path);
Matrix parse_matrix(const Json& j, const std::string& path);
TraceContext parse_context(const Json& j, const std::string& path);
Grading parse_grading(const Json& j, int dim, const std::string& path);
Chain parse_chain(const Json& j, const TraceContext& ctx, const std::string& path);
QuadratureSpec parse_quadrature(const Json& j, const std::string& path);

using AnyModule = std::variant<BoundedModule, UnboundedModule>;
AnyModule parse_module(const Json& j, const std::string& path);

Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const TraceContext& ctx);
Json to_json(const Chain& c);
Json to_json(const UnboundedModule& m);
Json to_json(const BoundedModule& m);
Json to_json(const CheckReport& r);
Json to_json(const IndexReport& r);
Json to_json(const ValidationReport& r);

}  // namespace breuer
