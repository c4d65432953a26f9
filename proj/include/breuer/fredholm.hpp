#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "breuer/semifinite.hpp"

namespace breuer {

struct BoundedModule {
  TraceContext ctx;
  std::vector<Matrix> generators;
  Matrix F;
  std::optional<Grading> grading;
};

struct UnboundedModule {
  TraceContext ctx;
  std::vector<Matrix> generators;
  Matrix D;
  std::optional<Grading> grading;
};

struct Check {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = true;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Check> checks;
  std::map<std::string, double> values;
  void add(std::string name, double residual, double tol);
};

ValidationReport validate(const BoundedModule& m, const std::vector<double>& ps = {});
ValidationReport validate(const UnboundedModule& m, const std::vector<double>& ps = {});

enum class IndexMethod { kernel, parametrix, mckean_singer, cohomological_connes, cohomological_jlo, spectral_flow };
const char* to_string(IndexMethod m);

struct IndexReport {
  double value = 0;
  IndexMethod method = IndexMethod::kernel;
  std::map<std::string, double> diagnostics;
};

void require_projection(const TraceContext& ctx, const Matrix& p, const char* what);
void require_unitary(const Matrix& u, const char* what);

IndexReport ef_index_kernel(const TraceContext& ctx, const Matrix& e, const Matrix& f, const Matrix& T,
                            double tol = 1e-9);
Matrix pseudo_parametrix(const TraceContext& ctx, const Matrix& e, const Matrix& f, const Matrix& T,
                         double tol = 1e-9);
IndexReport ef_index_parametrix(const TraceContext& ctx, const Matrix& e, const Matrix& f, const Matrix& T,
                                const Matrix& S, int m);

BoundedModule inflate(const BoundedModule& m, int N);
UnboundedModule inflate(const UnboundedModule& m, int N);

// p is given in the M_N-inflated basis
IndexReport pairing_even_bounded(const BoundedModule& m, const Matrix& p, int N, double tol = 1e-9);
IndexReport pairing_odd_bounded(const BoundedModule& m, const Matrix& u, int N, double tol = 1e-9);
IndexReport mckean_singer(const UnboundedModule& m, const Matrix& p, int N, double t);
IndexReport spectral_flow(const TraceContext& ctx, const std::vector<Matrix>& path);

void require_invertible(const UnboundedModule& m);
BoundedModule to_bounded(const UnboundedModule& m);
UnboundedModule double_module(const UnboundedModule& m);
// p (+) 0 in the doubled basis
Matrix double_projection(const TraceContext& ctx, const Matrix& p);

Matrix d_alpha(const UnboundedModule& m, double alpha);
Matrix d_alpha_dot(const UnboundedModule& m, double alpha);  // -D_alpha ln|D|

struct InterpolationReport {
  double lhs = 0;
  double rhs = 0;
  double rhs_inverse = 0;  // same bound with || |D|^{-1} ||_p
  bool pass = false;
  bool pass_inverse = false;
};

InterpolationReport interpolation_bound_check(const UnboundedModule& m, const Matrix& a, double alpha, double p);

struct LogCommutatorReport {
  double lhs = 0;
  double rhs = 0;
  double C1 = 0;
  double C1prime = 0;
  bool pass = false;
};

double log_constant_C1();
double log_constant_C1prime();
LogCommutatorReport log_commutator_check(const UnboundedModule& m, const Matrix& a);

BoundReport perturbation_bound_check(const UnboundedModule& m, const Matrix& V, double eps);

}  // namespace breuer
