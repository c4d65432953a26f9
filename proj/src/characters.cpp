#include "breuer/characters.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace breuer {

Words jlo_words(const Matrix& D, const std::vector<Matrix>& a) {
  Word w;
  w.slots.push_back({a[0], SlotKind::a});
  for (size_t j = 1; j < a.size(); ++j) w.slots.push_back({commutator(D, a[j]), SlotKind::a});
  return {w};
}

Words alpha_words(const Matrix& D, const Matrix& V, const std::vector<Matrix>& a) {
  Words out;
  Word base = jlo_words(D, a)[0];
  for (size_t j = 1; j < a.size(); ++j) {
    Word w = base;
    w.slots[j].m = commutator(V, a[j]);
    out.push_back(std::move(w));
  }
  return out;
}

Words insert_koszul(const Words& words, const Matrix& Y) {
  Words out;
  for (const auto& w : words) {
    int count = 0;
    for (size_t q = 1; q <= w.slots.size(); ++q) {
      if (w.slots[q - 1].kind != SlotKind::even) ++count;
      Word v;
      v.sign = (count % 2 ? -1.0 : 1.0) * w.sign;
      v.slots.assign(w.slots.begin(), w.slots.begin() + q);
      v.slots.push_back({Y, SlotKind::odd});
      v.slots.insert(v.slots.end(), w.slots.begin() + q, w.slots.end());
      out.push_back(std::move(v));
    }
  }
  return out;
}

Words insert_even(const Words& words, const Matrix& X) {
  Words out;
  for (const auto& w : words) {
    for (size_t q = 1; q <= w.slots.size(); ++q) {
      Word v;
      v.sign = w.sign;
      v.slots.assign(w.slots.begin(), w.slots.begin() + q);
      v.slots.push_back({X, SlotKind::even});
      v.slots.insert(v.slots.end(), w.slots.begin() + q, w.slots.end());
      out.push_back(std::move(v));
    }
  }
  return out;
}

Words negate(Words w) {
  for (auto& x : w) x.sign = -x.sign;
  return w;
}

Words concat(Words x, const Words& y) {
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

Complex evaluate(const HeatKernel& k, const Words& words) {
  CompensatedSum<Complex> s;
  std::vector<Matrix> f;
  for (const auto& w : words) {
    f.clear();
    for (const auto& sl : w.slots) f.push_back(sl.m);
    s.add(w.sign * k(f));
  }
  return s.value();
}

bool jlo_parity_ok(bool graded, int n) { return n >= 0 && (graded ? n % 2 == 0 : n % 2 == 1); }

namespace {

std::shared_ptr<HeatKernel> kernel(const UnboundedModule& m, const Matrix& D, const BracketOptions& opt) {
  return std::make_shared<HeatKernel>(m.ctx, D, m.grading, 1.0, opt);
}

void require_same_parity(const UnboundedModule& m, const Matrix& V, const char* what) {
  require_affiliated(m.ctx, V, what);
  if (m.grading && V.norm() > 0 && parity_of(V, *m.grading) != Parity::odd)
    throw ValidationError(std::string(what) + " must be odd like D");
}

// levels n with bracket level n + extra inside the cap and the given parity shift
std::function<bool(int)> levels(bool graded, int shift, int extra, int cap) {
  return [=](int n) { return n >= 0 && n + extra <= cap && jlo_parity_ok(graded, n + shift); };
}

}  // namespace

Cochain jlo(const UnboundedModule& m, const BracketOptions& opt) {
  auto k = kernel(m, m.D, opt);
  Matrix D = m.D;
  Cochain c;
  c.supports = levels(m.grading.has_value(), 0, 0, opt.level_cap);
  c.eval = [k, D](const std::vector<Matrix>& a) { return evaluate(*k, jlo_words(D, a)); };
  return c;
}

Cochain jlo_cochain(const UnboundedModule& m, int n, const BracketOptions& opt) {
  if (!jlo_parity_ok(m.grading.has_value(), n))
    throw LevelError("JLO level " + std::to_string(n) + " does not match the grading");
  Cochain c = jlo(m, opt);
  c.supports = [n](int l) { return l == n; };
  return c;
}

Cochain jlo_v(const UnboundedModule& m, const Matrix& V, const BracketOptions& opt) {
  require_same_parity(m, V, "V");
  auto k = kernel(m, m.D, opt);
  Matrix D = m.D;
  Cochain c;
  c.supports = levels(m.grading.has_value(), 1, 1, opt.level_cap);
  c.eval = [k, D, V](const std::vector<Matrix>& a) { return evaluate(*k, insert_koszul(jlo_words(D, a), V)); };
  return c;
}

Cochain alpha_cochain(const UnboundedModule& m, const Matrix& V, const BracketOptions& opt) {
  require_same_parity(m, V, "V");
  auto k = kernel(m, m.D, opt);
  Matrix D = m.D;
  Cochain c;
  c.supports = levels(m.grading.has_value(), 0, 0, opt.level_cap);
  c.eval = [k, D, V](const std::vector<Matrix>& a) { return evaluate(*k, alpha_words(D, V, a)); };
  return c;
}

Cochain jlo_vw(const UnboundedModule& m, const Matrix& V, const Matrix& W, const BracketOptions& opt) {
  require_same_parity(m, V, "V");
  require_same_parity(m, W, "W");
  auto k = kernel(m, m.D, opt);
  Matrix D = m.D;
  Cochain c;
  c.supports = levels(m.grading.has_value(), 0, 2, opt.level_cap);
  c.eval = [k, D, V, W](const std::vector<Matrix>& a) {
    return evaluate(*k, insert_koszul(insert_koszul(jlo_words(D, a), V), W));
  };
  return c;
}

Cochain iota_even_jlo(const UnboundedModule& m, const Matrix& X, const BracketOptions& opt) {
  require_affiliated(m.ctx, X, "X");
  auto k = kernel(m, m.D, opt);
  Matrix D = m.D;
  Cochain c;
  c.supports = levels(m.grading.has_value(), 0, 1, opt.level_cap);
  c.eval = [k, D, X](const std::vector<Matrix>& a) { return evaluate(*k, insert_even(jlo_words(D, a), X)); };
  return c;
}

Cochain jlo_vw_identity_rhs(const UnboundedModule& m, const Matrix& V, const Matrix& W, const BracketOptions& opt) {
  require_same_parity(m, V, "V");
  require_same_parity(m, W, "W");
  auto k = kernel(m, m.D, opt);
  Matrix D = m.D;
  Matrix XV = D * V + V * D, XW = D * W + W * D;
  Cochain c;
  c.supports = levels(m.grading.has_value(), 1, 2, opt.level_cap);
  c.eval = [=](const std::vector<Matrix>& a) {
    Words base = jlo_words(D, a);
    Words lw = concat(insert_even(base, XW), negate(alpha_words(D, W, a)));
    Words lv = concat(insert_even(base, XV), negate(alpha_words(D, V, a)));
    return evaluate(*k, concat(insert_koszul(lw, V), negate(insert_koszul(lv, W))));
  };
  return c;
}

namespace {

void require_involution(const BoundedModule& m) {
  require_affiliated(m.ctx, m.F, "F");
  Matrix I = Matrix::Identity(m.F.rows(), m.F.cols());
  if ((m.F * m.F - I).norm() > 1e-8 * std::max(1.0, m.F.norm())) throw ValidationError("F^2 != 1");
  if (m.grading) require_grading(m.ctx, *m.grading);
}

double connes_constant(int n) { return std::tgamma(n / 2.0 + 1) / (2 * std::tgamma(n + 1.0)); }

Matrix chi_of(const BoundedModule& m) {
  if (m.grading) return Matrix(m.grading->cast<Complex>().asDiagonal());
  return Matrix::Identity(m.F.rows(), m.F.cols());
}

}  // namespace

Cochain connes_cochain(const BoundedModule& m, int n) {
  require_involution(m);
  if (!jlo_parity_ok(m.grading.has_value(), n))
    throw LevelError("Connes level " + std::to_string(n) + " does not match the grading");
  Matrix lead = chi_of(m) * m.F;
  Matrix F = m.F;
  TraceContext ctx = m.ctx;
  double cn = connes_constant(n);
  Cochain c;
  c.supports = [n](int l) { return l == n; };
  c.eval = [=](const std::vector<Matrix>& a) {
    Matrix P = lead;
    for (const auto& x : a) P = P * commutator(F, x);
    return cn * trace(ctx, P);
  };
  return c;
}

Cochain psi_cochain(const BoundedModule& m, int n) {
  require_involution(m);
  if (!jlo_parity_ok(m.grading.has_value(), n))
    throw LevelError("psi level " + std::to_string(n) + " does not match the grading");
  Matrix chi = chi_of(m);
  Matrix F = m.F;
  TraceContext ctx = m.ctx;
  double cn = std::tgamma(n / 2.0 + 2) / std::tgamma(n + 3.0);
  Cochain c;
  c.supports = [n](int l) { return l == n + 1; };
  c.eval = [=](const std::vector<Matrix>& a) {
    Matrix P = chi * a[0] * F;
    for (size_t j = 1; j < a.size(); ++j) P = P * commutator(F, a[j]);
    return cn * trace(ctx, P);
  };
  return c;
}

Cochain connes_transgression(const BoundedModule& m, const Matrix& Fdot, int n) {
  require_involution(m);
  require_affiliated(m.ctx, Fdot, "Fdot");
  if (n < 1 || !jlo_parity_ok(m.grading.has_value(), n))
    throw LevelError("transgression level " + std::to_string(n) + " does not match the grading");
  Matrix lead = chi_of(m) * m.F;
  Matrix F = m.F;
  TraceContext ctx = m.ctx;
  double cn = connes_constant(n);
  Cochain c;
  c.supports = [n](int l) { return l == n - 1; };
  c.eval = [=](const std::vector<Matrix>& b) {
    std::vector<Matrix> cm;
    for (const auto& x : b) cm.push_back(commutator(F, x));
    CompensatedSum<Complex> s;
    for (int k = 0; k < n; ++k) {
      Matrix P = lead;
      for (int j = 0; j <= k; ++j) P = P * cm[j];
      P = P * Fdot;
      for (int j = k + 1; j < n; ++j) P = P * cm[j];
      s.add((k % 2 ? 1.0 : -1.0) * trace(ctx, P));
    }
    return cn * s.value();
  };
  return c;
}

std::vector<Chain> chern_plus(const TraceContext& ctx, const Matrix& p, int max_k) {
  require_projection(ctx, p, "p");
  if (max_k < 0) throw ParameterError("max_k must be nonnegative");
  std::vector<Chain> out;
  out.push_back(canonicalize(Chain::elementary(ctx, {p})));
  Matrix I = Matrix::Identity(p.rows(), p.cols());
  for (int k = 1; k <= max_k; ++k) {
    double c = (k % 2 ? -1.0 : 1.0) * std::tgamma(2 * k + 1.0) / (2 * std::tgamma(k + 1.0));
    std::vector<Matrix> e{2.0 * p - I};
    for (int j = 0; j < 2 * k; ++j) e.push_back(p);
    out.push_back(canonicalize(Chain::elementary(ctx, e, c)));
  }
  return out;
}

std::vector<Chain> chern_minus(const TraceContext& ctx, const Matrix& u, int max_k) {
  require_affiliated(ctx, u, "u");
  require_unitary(u, "u");
  if (max_k < 0) throw ParameterError("max_k must be nonnegative");
  std::vector<Chain> out;
  Matrix ui = u.adjoint();
  for (int k = 0; k <= max_k; ++k) {
    double c = (k % 2 ? 1.0 : -1.0) * std::tgamma(k + 1.0) / std::sqrt(M_PI);
    std::vector<Matrix> e;
    for (int j = 0; j <= k; ++j) {
      e.push_back(ui);
      e.push_back(u);
    }
    out.push_back(canonicalize(Chain::elementary(ctx, e, c)));
  }
  return out;
}

namespace {

// Ch^{n+1}(uD, V) on Bc for a single term list, u given
Complex deformed_on(const UnboundedModule& m, const Matrix& V, double u, const Chain& Bc, const BracketOptions& opt) {
  Matrix Du = u * m.D;
  HeatKernel k(m.ctx, Du, m.grading, 1.0, opt);
  CompensatedSum<Complex> s;
  for (const auto& t : Bc.terms) s.add(t.coeff * evaluate(k, insert_koszul(jlo_words(Du, t.entries), V)));
  return s.value();
}

void check_retract_level(const UnboundedModule& m, int n, const BracketOptions& opt) {
  if (!jlo_parity_ok(m.grading.has_value(), n))
    throw LevelError("retracted level " + std::to_string(n) + " does not match the grading");
  if (n + 2 > opt.level_cap) throw CapError("retracted level " + std::to_string(n) + " needs brackets above the cap");
}

}  // namespace

Cochain retracted_jlo(const UnboundedModule& m, int n, double t, const QuadratureSpec& q, const BracketOptions& opt) {
  check_retract_level(m, n, opt);
  if (std::isinf(t)) return jlo_limit(m, n, q, opt);
  if (!(t >= 0)) throw ParameterError("t must be nonnegative");
  auto k = std::make_shared<HeatKernel>(m.ctx, m.D, m.grading, t, opt);
  Matrix tD = t * m.D;
  bool graded = m.grading.has_value();
  Cochain c;
  c.supports = [n, graded](int l) { return l >= 0 && l <= n && jlo_parity_ok(graded, l); };
  c.eval = [=](const std::vector<Matrix>& a) {
    // heat kernel k already carries the scale t; commutators use tD
    Complex v = evaluate(*k, jlo_words(tD, a));
    if (static_cast<int>(a.size()) - 1 < n || t == 0) return v;
    Chain Bc = boundary_B(Chain::elementary(m.ctx, a));
    std::function<Complex(double)> f = [&](double u) { return deformed_on(m, m.D, u, Bc, opt); };
    return v - integrate_panels<Complex>(f, 0.0, t, q.panels, q.order);
  };
  return c;
}

namespace {

// int_U^inf u^p e^{-c u^2} du, valid once 2 c U^2 > p - 1
double gauss_moment_tail(int p, double c, double U) {
  double den = 2 * c - (p - 1) / (U * U);
  if (den <= 0) return INFINITY;
  return std::pow(U, p - 1) * std::exp(-c * U * U) / den;
}

}  // namespace

Cochain jlo_limit(const UnboundedModule& m, int n, const QuadratureSpec& q, const BracketOptions& opt,
                  LimitDiagnostics* diag) {
  check_retract_level(m, n, opt);
  require_invertible(m);
  BlockSpectrum sp = block_eigh(m.ctx, m.D);
  double lam = INFINITY;
  for (const auto& v : sp.values)
    if (v.size() > 0) lam = std::min(lam, v.cwiseAbs().minCoeff());
  const double c = lam * lam;
  const int p = n + 1;
  // envelope K u^p e^{-c u^2}; pick U so the tail is negligible against its full integral
  double U = q.cutoff;
  double rel_tail = 0;
  const double full = std::tgamma((p + 1) / 2.0) / (2 * std::pow(c, (p + 1) / 2.0));
  if (U <= 0) {
    U = 1.5 * std::sqrt(std::max(1.0, double(p)) / c);
    while (gauss_moment_tail(p, c, U) > 1e-14 * full) U *= 1.1;
  }
  rel_tail = gauss_moment_tail(p, c, U) / full;
  if (diag) {
    diag->cutoff = U;
    diag->tail_bound = rel_tail;
  }
  UnboundedModule mm = m;
  Cochain out;
  out.supports = [n](int l) { return l == n; };
  out.eval = [=](const std::vector<Matrix>& a) {
    Chain Bc = boundary_B(Chain::elementary(mm.ctx, a));
    std::function<Complex(double)> f = [&](double u) { return deformed_on(mm, mm.D, u, Bc, opt); };
    return -integrate_panels<Complex>(f, 0.0, U, q.panels, q.order);
  };
  return out;
}

double reduction_scalar_factor(int n, const QuadratureSpec& q) {
  if (n < 0) throw ParameterError("n must be nonnegative");
  const int p = n + 1;
  double U = q.cutoff;
  const double full = std::tgamma((p + 1) / 2.0) / 2;
  if (U <= 0) {
    U = 1.5 * std::sqrt(double(std::max(1, p)));
    while (gauss_moment_tail(p, 1.0, U) > 1e-16 * full) U *= 1.1;
  }
  std::function<double(double)> f = [p](double u) { return std::pow(u, p) * std::exp(-u * u); };
  return integrate_panels<double>(f, 0.0, U, q.panels, q.order);
}

double getzler_bound(const TraceContext& ctx, const Matrix& D, int n, int k, const std::vector<double>& F_norms,
                     const std::vector<double>& R_norms, double delta, double eps) {
  if (!(delta > 0 && delta < 1 / (2 * M_E))) throw ParameterError("delta must lie in (0, 1/(2e))");
  if (!(eps >= 0 && eps < 1)) throw ParameterError("eps must lie in [0, 1)");
  if (n < 0 || k < 0 || k > n) throw ParameterError("need 0 <= k <= n");
  if (F_norms.size() != size_t(n + 1) || R_norms.size() != size_t(n + 1))
    throw ParameterError("norm lists must have n+1 entries");
  double prod = 1;
  for (int j = 0; j <= n; ++j) prod *= F_norms[j] + R_norms[j];
  return std::pow(2 / ((1 - eps) * delta * M_E), k) * heat_trace(ctx, D, 1 - delta) / std::tgamma(n - k + 1.0) * prod;
}

IndexReport connes_pairing_even(const BoundedModule& m, const Matrix& p, int N, int n) {
  if (!m.grading) throw ValidationError("even pairing needs a graded module");
  if (n < 0 || n % 2) throw LevelError("even pairing needs an even level");
  BoundedModule mN = inflate(m, N);
  auto ch = chern_plus(mN.ctx, p, n / 2);
  IndexReport r;
  r.method = IndexMethod::cohomological_connes;
  r.value = pair(connes_cochain(mN, n), ch[n / 2]).real();
  r.diagnostics["level"] = n;
  return r;
}

IndexReport connes_pairing_odd(const BoundedModule& m, const Matrix& u, int N, int n) {
  if (m.grading) throw ValidationError("odd pairing needs an ungraded module");
  if (n < 1 || n % 2 == 0) throw LevelError("odd pairing needs an odd level");
  BoundedModule mN = inflate(m, N);
  auto ch = chern_minus(mN.ctx, u, (n - 1) / 2);
  IndexReport r;
  r.method = IndexMethod::cohomological_connes;
  Complex v = pair(connes_cochain(mN, n), ch[(n - 1) / 2]);
  r.value = v.real();
  r.diagnostics["level"] = n;
  r.diagnostics["imag"] = v.imag();
  return r;
}

IndexReport jlo_pairing_even(const UnboundedModule& m, const Matrix& p, int N, int n, double delta,
                             const BracketOptions& opt) {
  if (!m.grading) throw ValidationError("even pairing needs a graded module");
  if (n < 0 || n % 2) throw LevelError("even pairing needs an even level");
  UnboundedModule mN = inflate(m, N);
  auto ch = chern_plus(mN.ctx, p, n / 2);
  Cochain phi = jlo(mN, opt);
  CompensatedSum<Complex> s;
  for (int k = 0; k <= n / 2; ++k) s.add(pair(phi, ch[k]));
  // level 2k term is bounded by tau(e^{-(1-delta)D^2})/2 x^k/k!, x = ||[D,p]||^2
  const double x = std::pow(op_norm(commutator(mN.D, p)), 2);
  const double h = heat_trace(mN.ctx, mN.D, 1 - delta);
  double tail = 0, term = 1;
  for (int k = 1; k <= n / 2 + 200; ++k) {
    term *= x / k;
    if (k > n / 2) tail += term;
    if (k > n / 2 && term < 1e-18 * tail) break;
  }
  IndexReport r;
  r.method = IndexMethod::cohomological_jlo;
  r.value = s.value().real();
  r.diagnostics["level"] = n;
  r.diagnostics["tail_bound"] = h / 2 * tail;
  r.diagnostics["imag"] = s.value().imag();
  return r;
}

IndexReport jlo_pairing_odd(const UnboundedModule& m, const Matrix& u, int N, int n, double delta,
                            const BracketOptions& opt) {
  if (m.grading) throw ValidationError("odd pairing needs an ungraded module");
  if (n < 1 || n % 2 == 0) throw LevelError("odd pairing needs an odd level");
  UnboundedModule mN = inflate(m, N);
  auto ch = chern_minus(mN.ctx, u, (n - 1) / 2);
  Cochain phi = jlo(mN, opt);
  CompensatedSum<Complex> s;
  for (int k = 0; k <= (n - 1) / 2; ++k) s.add(pair(phi, ch[k]));
  // level 2k+1 term is bounded by k!/sqrt(pi) tau(e^{-(1-delta)D^2}) y^{2k+1}/(2k+1)!
  const double y = op_norm(commutator(mN.D, u));
  const double h = heat_trace(mN.ctx, mN.D, 1 - delta);
  double tail = 0;
  for (int k = (n - 1) / 2 + 1; k < (n - 1) / 2 + 200; ++k) {
    double term = std::exp(std::lgamma(k + 1.0) - std::lgamma(2 * k + 2.0) + (2 * k + 1) * std::log(std::max(y, 1e-300)));
    tail += term;
    if (term < 1e-18 * tail) break;
  }
  IndexReport r;
  r.method = IndexMethod::cohomological_jlo;
  r.value = s.value().real();
  r.diagnostics["level"] = n;
  r.diagnostics["tail_bound"] = h / std::sqrt(M_PI) * tail;
  r.diagnostics["imag"] = s.value().imag();
  return r;
}

}  // namespace breuer
