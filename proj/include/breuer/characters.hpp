#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "breuer/bracket.hpp"
#include "breuer/chain.hpp"
#include "breuer/fredholm.hpp"
#include "breuer/quadrature.hpp"

namespace breuer {

// A bracket word: factors tagged as a-type (a_0, [D,a_j], [V,a_j]), odd
// insertions (V, W, D_alpha, ...) or even insertions (DV+VD).
enum class SlotKind { a, odd, even };

struct Slot {
  Matrix m;
  SlotKind kind;
};

struct Word {
  double sign = 1.0;
  std::vector<Slot> slots;
};

using Words = std::vector<Word>;

Words jlo_words(const Matrix& D, const std::vector<Matrix>& a);
Words alpha_words(const Matrix& D, const Matrix& V, const std::vector<Matrix>& a);
// Y at every position after a_0, sign (-1)^(a-type and odd slots before it)
Words insert_koszul(const Words& w, const Matrix& Y);
// X at every position after a_0, no sign
Words insert_even(const Words& w, const Matrix& X);
Words negate(Words w);
Words concat(Words x, const Words& y);
Complex evaluate(const HeatKernel& k, const Words& w);

bool jlo_parity_ok(bool graded, int n);

// Ch(D) at every level up to the bracket cap
Cochain jlo(const UnboundedModule& m, const BracketOptions& opt = {});
Cochain jlo_cochain(const UnboundedModule& m, int n, const BracketOptions& opt = {});
Cochain jlo_v(const UnboundedModule& m, const Matrix& V, const BracketOptions& opt = {});
Cochain alpha_cochain(const UnboundedModule& m, const Matrix& V, const BracketOptions& opt = {});
Cochain jlo_vw(const UnboundedModule& m, const Matrix& V, const Matrix& W, const BracketOptions& opt = {});
// iota(X) Ch(D), unsigned even insertion
Cochain iota_even_jlo(const UnboundedModule& m, const Matrix& X, const BracketOptions& opt = {});
// iota(V)(iota(DW+WD)Ch - alpha(W)) - iota(W)(iota(DV+VD)Ch - alpha(V))
Cochain jlo_vw_identity_rhs(const UnboundedModule& m, const Matrix& V, const Matrix& W, const BracketOptions& opt = {});

Cochain connes_cochain(const BoundedModule& m, int n);
// psi^{n+1}, a cochain on level n+1
Cochain psi_cochain(const BoundedModule& m, int n);
// iota(Fdot) ch^{n-1}(F), a cochain on level n-1
Cochain connes_transgression(const BoundedModule& m, const Matrix& Fdot, int n);

std::vector<Chain> chern_plus(const TraceContext& ctx, const Matrix& p, int max_k);
std::vector<Chain> chern_minus(const TraceContext& ctx, const Matrix& u, int max_k);

struct LimitDiagnostics {
  double cutoff = 0;
  double tail_bound = 0;
};

// Ch^{<=n}(tD) - B int_0^t Ch^{n+1}(uD, D) du
Cochain retracted_jlo(const UnboundedModule& m, int n, double t, const QuadratureSpec& q = {},
                      const BracketOptions& opt = {});
// t -> infinity limit, -B int_0^inf Ch^{n+1}(uD, D) du, on level n
Cochain jlo_limit(const UnboundedModule& m, int n, const QuadratureSpec& q = {}, const BracketOptions& opt = {},
                  LimitDiagnostics* diag = nullptr);
// int_0^inf u^{n+1} e^{-u^2} du by the same quadrature path
double reduction_scalar_factor(int n, const QuadratureSpec& q = {});

double getzler_bound(const TraceContext& ctx, const Matrix& D, int n, int k, const std::vector<double>& F_norms,
                     const std::vector<double>& R_norms, double delta, double eps);

// index pairings through characters; p and u in the inflated basis
IndexReport connes_pairing_even(const BoundedModule& m, const Matrix& p, int N, int n);
IndexReport connes_pairing_odd(const BoundedModule& m, const Matrix& u, int N, int n);
IndexReport jlo_pairing_even(const UnboundedModule& m, const Matrix& p, int N, int n, double delta = 0.05,
                             const BracketOptions& opt = {});
IndexReport jlo_pairing_odd(const UnboundedModule& m, const Matrix& u, int N, int n, double delta = 0.05,
                            const BracketOptions& opt = {});

}  // namespace breuer
