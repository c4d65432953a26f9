#include "breuer/checks.hpp"

#include <cmath>
#include <limits>

#include "breuer/random.hpp"

namespace breuer {

bool within(double residual, double scale, double tol) { return residual <= tol * scale + 1e-300; }

FiniteDifference central_difference(const std::function<Complex(double)>& f, Complex rhs, std::vector<double> hs) {
  FiniteDifference fd;
  fd.h = hs;
  for (double h : hs) fd.error.push_back(std::abs((f(h) - f(-h)) / (2 * h) - rhs));
  if (hs.size() >= 2) {
    double e0 = fd.error[0], e1 = fd.error[1];
    if (e0 > 0 && e1 > 0) {
      fd.slope = std::log(e0 / e1) / std::log(hs[0] / hs[1]);
      fd.slope_defined = true;
    }
  }
  return fd;
}

namespace {

// slope 2 +- 0.4 unless both errors already sit at roundoff
void finish_fd(CheckReport& r, const FiniteDifference& fd, double scale, double noise_floor) {
  r.residual = fd.error.back();
  r.scale = scale;
  r.has_slope = fd.slope_defined;
  r.slope = fd.slope;
  r.values["error_h0"] = fd.error.front();
  r.values["error_h1"] = fd.error.back();
  bool at_floor = fd.error.front() <= noise_floor * scale;
  r.pass = at_floor || (fd.slope_defined && std::abs(fd.slope - 2) <= 0.4);
  r.tolerance = 0.4;
}

std::vector<Matrix> insert_at(const std::vector<Matrix>& f, size_t q, const Matrix& x) {
  std::vector<Matrix> out(f.begin(), f.begin() + q);
  out.push_back(x);
  out.insert(out.end(), f.begin() + q, f.end());
  return out;
}

// absolute slack for samples whose exact value is zero
double roundoff_floor(const Chain& c) { return 1e-13 * (1 + chain_size(c)) * c.ctx.tau_one(); }

int degree(const Matrix& m, const Grading& g) {
  Parity p = parity_of(m, g, 1e-9);
  if (p == Parity::unassigned) throw ValidationError("factor has no declared parity");
  return p == Parity::odd ? 1 : 0;
}

}  // namespace

LemmaVariant lemma_variant_from(const std::string& s) {
  if (s == "cyclic") return LemmaVariant::cyclic;
  if (s == "insert_ones") return LemmaVariant::insert_ones;
  if (s == "bracket_D") return LemmaVariant::bracket_D;
  if (s == "bracket_D2") return LemmaVariant::bracket_D2;
  throw ParameterError("unknown lemma variant '" + s + "' (cyclic, insert_ones, bracket_D, bracket_D2)");
}

CheckReport lemma_misc_check(const TraceContext& ctx, const Matrix& D, const std::optional<Grading>& grading,
                             const std::vector<Matrix>& f, LemmaVariant v, int j) {
  if (f.empty()) throw ParameterError("need at least one factor");
  HeatKernel k(ctx, D, grading);
  const int n = static_cast<int>(f.size()) - 1;
  const Matrix I = Matrix::Identity(D.rows(), D.cols());
  Complex lhs = k(f), rhs = 0.0;
  double scale = std::abs(lhs);
  CheckReport r;
  switch (v) {
    case LemmaVariant::cyclic: {
      r.name = "lemma_cyclic";
      int s = grading ? degree(f[n], *grading) : 0;
      std::vector<Matrix> g{f[n]};
      g.insert(g.end(), f.begin(), f.end() - 1);
      rhs = (s ? -1.0 : 1.0) * k(g);
      break;
    }
    case LemmaVariant::insert_ones: {
      r.name = "lemma_insert_ones";
      CompensatedSum<Complex> s;
      for (int q = 1; q <= n + 1; ++q) {
        Complex x = k(insert_at(f, q, I));
        scale += std::abs(x);
        s.add(x);
      }
      rhs = s.value();
      break;
    }
    case LemmaVariant::bracket_D: {
      r.name = "lemma_bracket_D";
      // sum_j (-1)^{deg F_0..F_{j-1}} <.., [D,F_j]_graded, ..> = 0
      CompensatedSum<Complex> s;
      int deg = 0;
      for (int q = 0; q <= n; ++q) {
        int dq = grading ? degree(f[q], *grading) : 0;
        Matrix c = D * f[q] - (dq ? -1.0 : 1.0) * f[q] * D;
        std::vector<Matrix> g = f;
        g[q] = c;
        Complex x = (deg % 2 ? -1.0 : 1.0) * k(g);
        scale += std::abs(x);
        s.add(x);
        deg += dq;
      }
      lhs = s.value();
      rhs = 0.0;
      break;
    }
    case LemmaVariant::bracket_D2: {
      r.name = "lemma_bracket_D2";
      if (j < 1 || j > n - 1) throw ParameterError("bracket_D2 needs 1 <= j <= n-1");
      std::vector<Matrix> g = f;
      g[j] = commutator(D * D, f[j]);
      lhs = k(g);
      std::vector<Matrix> l(f.begin(), f.begin() + j - 1), rr(f.begin(), f.begin() + j);
      l.push_back(f[j - 1] * f[j]);
      l.insert(l.end(), f.begin() + j + 1, f.end());
      rr.push_back(f[j] * f[j + 1]);
      rr.insert(rr.end(), f.begin() + j + 2, f.end());
      Complex a = k(l), b = k(rr);
      rhs = a - b;
      scale = std::abs(lhs) + std::abs(a) + std::abs(b);
      break;
    }
  }
  r.residual = std::abs(lhs - rhs);
  r.scale = std::max(scale, 1e-300);
  r.tolerance = 1e-9;
  r.pass = within(r.residual, std::max(r.scale, 1.0), r.tolerance);
  r.values["lhs"] = std::abs(lhs);
  r.values["rhs"] = std::abs(rhs);
  return r;
}

std::vector<Chain> random_chains(const TraceContext& ctx, int level, int count, std::uint64_t seed,
                                 const std::optional<Grading>& even_in, int terms) {
  Rng rng(seed);
  std::vector<Chain> out;
  for (int c = 0; c < count; ++c) {
    Chain ch = Chain::zero(ctx, level);
    for (int t = 0; t < terms; ++t) {
      std::vector<Matrix> e;
      for (int j = 0; j <= level; ++j) e.push_back(even_in ? random_even(ctx, *even_in, rng) : random_affiliated(ctx, rng));
      ch.terms.push_back({Complex(gaussian(rng), gaussian(rng)), std::move(e)});
    }
    out.push_back(canonicalize(ch));
  }
  return out;
}

CheckReport complex_identities_check(int chains, int cochains, std::uint64_t seed) {
  Rng rng(seed);
  CheckReport r;
  r.name = "bicomplex";
  r.tolerance = 1e-10;
  r.pass = true;
  double worst = 0;
  for (int i = 0; i < chains; ++i) {
    TraceContext ctx = random_context(rng, 2, 2);
    if (ctx.total_dim() > 4) ctx = TraceContext({{2, 0.5 + uniform(rng)}, {2, uniform(rng, 0.1, 1.0)}});
    int level = static_cast<int>(uniform(rng, 0, 6));
    if (level > 5) level = 5;
    Chain c = random_chains(ctx, level, 1, rng(), std::nullopt, 1 + static_cast<int>(uniform(rng, 0, 3)))[0];
    double size = std::max(1.0, chain_size(c));
    Chain bb = boundary_b(boundary_b(c));
    Chain BB = boundary_B(boundary_B(c));
    Chain mix = level == 0 ? boundary_b(boundary_B(c)) : canonicalize(boundary_b(boundary_B(c)) + boundary_B(boundary_b(c)));
    for (int k = 0; k < cochains; ++k) {
      Cochain phi = test_cochain(ctx, level + 2, seed * 1000 + k);
      double scale = size * std::pow(double(ctx.total_dim()), level + 2);
      for (const Chain* x : {&bb, &BB, &mix}) {
        if (x->terms.empty()) continue;
        double res = std::abs(pair(phi, *x));
        worst = std::max(worst, res / scale);
        if (!within(res, scale, r.tolerance)) r.pass = false;
      }
    }
  }
  r.residual = worst;
  r.scale = 1;
  r.values["chains"] = chains;
  r.values["cochains"] = cochains;
  return r;
}

CheckReport bracket_agreement_check(int instances, std::uint64_t seed, long mc_samples) {
  Rng rng(seed);
  CheckReport r;
  r.name = "bracket_methods";
  r.pass = true;
  double worst_nq = 0, worst_mc = 0;
  for (int i = 0; i < instances; ++i) {
    int d = 1 + static_cast<int>(uniform(rng, 0, 6));
    if (d > 6) d = 6;
    TraceContext ctx = d >= 4 ? TraceContext({{d / 2, 0.7}, {d - d / 2, 1.3}}) : TraceContext({{d, 1.0}});
    int n = static_cast<int>(uniform(rng, 0, 4));
    if (n > 3) n = 3;
    Matrix D = random_hermitian(ctx, rng) * 0.5;
    std::optional<Grading> g;
    std::vector<Matrix> f;
    Matrix I = Matrix::Identity(d, d);
    for (int j = 0; j <= n; ++j) f.push_back(I + 0.3 * random_affiliated(ctx, rng));
    HeatKernel k(ctx, D, g);
    BracketOptions o;
    Complex dd = k.bracket(f, o);
    o.method = BracketMethod::nested_quadrature;
    Complex nq = k.bracket(f, o);
    o.method = BracketMethod::monte_carlo;
    o.samples = mc_samples;
    o.seed = seed + i;
    Complex mc = k.bracket(f, o);
    double e1 = std::abs(dd - nq) / std::abs(dd), e2 = std::abs(dd - mc) / std::abs(dd);
    worst_nq = std::max(worst_nq, e1);
    worst_mc = std::max(worst_mc, e2);
    if (e1 > 1e-6 || e2 > 1e-2) r.pass = false;
  }
  r.residual = worst_nq;
  r.tolerance = 1e-6;
  r.values["worst_nested_rel"] = worst_nq;
  r.values["worst_monte_carlo_rel"] = worst_mc;
  r.values["instances"] = instances;
  return r;
}

CheckReport jlo_cocycle_check(const UnboundedModule& m, int n, const std::vector<Chain>& chains,
                              const BracketOptions& opt) {
  Cochain ch = jlo(m, opt);
  CheckReport r;
  r.name = "jlo_cocycle";
  r.tolerance = 1e-8;
  r.pass = true;
  for (const auto& c : chains) {
    if (c.level != n + 1) throw LevelError("cocycle check needs level n+1 chains");
    Complex a = pair(ch, boundary_b(c)), b = pair(ch, boundary_B(c));
    double res = std::abs(a + b), scale = std::abs(a) + std::abs(b);
    r.residual = std::max(r.residual, res);
    r.scale = std::max(r.scale, scale);
    if (res > r.tolerance * scale + roundoff_floor(c)) r.pass = false;
  }
  return r;
}

CheckReport connes_cocycle_check(const BoundedModule& m, int n, const std::vector<Chain>& level_n,
                                 const std::vector<Chain>& level_n2) {
  Cochain ch = connes_cochain(m, n), ch2 = connes_cochain(m, n + 2), psi = psi_cochain(m, n);
  CheckReport r;
  r.name = "connes_cocycle";
  r.tolerance = 1e-10;
  r.pass = true;
  double worst_B = 0, worst_b = 0;
  for (const auto& c : level_n) {
    Complex a = pair(ch, c), b = pair(psi, boundary_B(c));
    double res = std::abs(a - b), scale = std::max(1.0, std::abs(a));
    worst_B = std::max(worst_B, res / scale);
    if (!within(res, scale, r.tolerance)) r.pass = false;
  }
  for (const auto& c : level_n2) {
    Complex a = pair(ch2, c), b = pair(psi, boundary_b(c));
    double res = std::abs(a + b), scale = std::max(1.0, std::abs(a));
    worst_b = std::max(worst_b, res / scale);
    if (!within(res, scale, r.tolerance)) r.pass = false;
  }
  r.residual = std::max(worst_B, worst_b);
  r.values["ch_vs_psiB"] = worst_B;
  r.values["ch2_vs_psib"] = worst_b;
  return r;
}

CheckReport jlo_v_identity_check(const UnboundedModule& m, const Matrix& V, const std::vector<Chain>& chains,
                           const BracketOptions& opt) {
  Cochain cv = jlo_v(m, V, opt), al = alpha_cochain(m, V, opt), ie = iota_even_jlo(m, m.D * V + V * m.D, opt);
  CheckReport r;
  r.name = "jlo_v_identity";
  r.tolerance = 1e-8;
  r.pass = true;
  for (const auto& c : chains) {
    Complex lhs = pair(cv, boundary_B(c));
    if (c.level > 0) lhs += pair(cv, boundary_b(c));
    Complex x = pair(ie, c), y = pair(al, c);
    double res = std::abs(lhs + x - y), scale = std::abs(lhs) + std::abs(x) + std::abs(y);
    r.residual = std::max(r.residual, res);
    r.scale = std::max(r.scale, scale);
    if (res > r.tolerance * scale + roundoff_floor(c)) r.pass = false;
  }
  return r;
}

CheckReport jlo_vw_identity_check(const UnboundedModule& m, const Matrix& V, const Matrix& W,
                            const std::vector<Chain>& chains, const BracketOptions& opt) {
  Cochain vw = jlo_vw(m, V, W, opt), rhs = jlo_vw_identity_rhs(m, V, W, opt);
  CheckReport r;
  r.name = "jlo_vw_identity";
  r.tolerance = 1e-8;
  r.pass = true;
  for (const auto& c : chains) {
    Complex lhs = pair(vw, boundary_B(c));
    if (c.level > 0) lhs += pair(vw, boundary_b(c));
    Complex x = pair(rhs, c);
    double res = std::abs(lhs - x), scale = std::abs(lhs) + std::abs(x);
    r.residual = std::max(r.residual, res);
    r.scale = std::max(r.scale, scale);
    if (res > r.tolerance * scale + roundoff_floor(c)) r.pass = false;
  }
  return r;
}

CheckReport duhamel_check(const TraceContext& ctx, const Matrix& D, const Matrix& V,
                          const std::optional<Grading>& grading, const std::vector<Matrix>& factors,
                          std::vector<double> hs) {
  HeatKernel k(ctx, D, grading);
  Matrix X = D * V + V * D;
  CompensatedSum<Complex> s;
  double scale = 0;
  for (size_t q = 1; q <= factors.size(); ++q) {
    Complex x = k(insert_at(factors, q, X));
    scale += std::abs(x);
    s.add(-x);
  }
  std::function<Complex(double)> f = [&](double t) { return HeatKernel(ctx, D + t * V, grading)(factors); };
  auto fd = central_difference(f, s.value(), hs);
  CheckReport r;
  r.name = "duhamel";
  // size of the problem, for brackets that vanish by parity
  double natural = ctx.tau_one() * std::max(1.0, op_norm(X));
  for (const auto& f : factors) natural *= op_norm(f);
  finish_fd(r, fd, std::max({scale, std::abs(k(factors)), 1e-3 * natural}), 1e-9);
  r.values["rhs"] = std::abs(s.value());
  return r;
}

CheckReport cobound_check(const UnboundedModule& m, const Matrix& V, const Chain& c, std::vector<double> hs,
                          const BracketOptions& opt) {
  Cochain cv = jlo_v(m, V, opt);
  Complex rhs = pair(cv, boundary_B(c));
  if (c.level > 0) rhs += pair(cv, boundary_b(c));
  std::function<Complex(double)> f = [&](double t) {
    UnboundedModule mt = m;
    mt.D = m.D + t * V;
    return pair(jlo(mt, opt), c);
  };
  auto fd = central_difference(f, rhs, hs);
  CheckReport r;
  r.name = "cobound";
  finish_fd(r, fd, std::max({std::abs(rhs), std::abs(f(0)), 1e-300}), 1e-9);
  return r;
}

CheckReport connes_transgression_check(const BoundedModule& m, const Matrix& H, int n, const Chain& c,
                                       std::vector<double> hs) {
  if (!is_self_adjoint(H)) throw ValidationError("rotation generator must be self-adjoint");
  if (m.grading && parity_of(H, *m.grading) != Parity::even) throw ValidationError("rotation generator must be even");
  const Complex i(0, 1);
  Matrix Fdot = i * commutator(H, m.F);
  Complex rhs = pair(connes_transgression(m, Fdot, n), boundary_b(c));
  std::function<Complex(double)> f = [&](double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    Eigen::VectorXcd ph = (i * t * es.eigenvalues().cast<Complex>()).array().exp();
    Matrix R = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    BoundedModule mt = m;
    mt.F = R * m.F * R.adjoint();
    return pair(connes_cochain(mt, n), c);
  };
  auto fd = central_difference(f, rhs, hs);
  CheckReport r;
  r.name = "connes_transgression";
  finish_fd(r, fd, std::max({std::abs(rhs), std::abs(f(0)), 1e-300}), 1e-10);
  return r;
}

CheckReport reduction_check(const UnboundedModule& m, int n, const std::vector<Chain>& chains,
                            const QuadratureSpec& q, const BracketOptions& opt) {
  BoundedModule bm = to_bounded(m);
  UnboundedModule fm{m.ctx, m.generators, bm.F, m.grading};
  LimitDiagnostics diag;
  Cochain lim = jlo_limit(fm, n, q, opt, &diag);
  Cochain ch = connes_cochain(bm, n);
  CheckReport r;
  r.name = "reduction";
  r.tolerance = 1e-8;
  r.pass = true;
  for (const auto& c : chains) {
    Complex a = pair(lim, c), b = pair(ch, c);
    double res = std::abs(a - b), scale = std::max(1.0, std::abs(b));
    r.residual = std::max(r.residual, res / scale);
    if (!within(res, scale, r.tolerance)) r.pass = false;
  }
  r.values["cutoff"] = diag.cutoff;
  r.values["tail_bound"] = diag.tail_bound;
  return r;
}

CheckReport d_alpha_transgression_check(const UnboundedModule& m, int n, double alpha, double t, const Chain& c,
                                        std::vector<double> hs, const QuadratureSpec& q, const BracketOptions& opt) {
  if (!(alpha >= 0 && alpha <= 1)) throw ParameterError("alpha must lie in [0,1]");
  if (!(t > 0) || std::isinf(t)) throw ParameterError("t must be finite and positive");
  const int lvl = c.level;
  if (lvl > n) throw LevelError("chain level above the retraction level");
  std::function<Complex(double)> f = [&](double h) {
    double a = std::clamp(alpha + h, 0.0, 1.0);
    UnboundedModule ma = m;
    ma.D = d_alpha(m, a);
    return pair(retracted_jlo(ma, n, t, q, opt), c);
  };
  Matrix Da = d_alpha(m, alpha), Dd = d_alpha_dot(m, alpha);
  UnboundedModule mt = m;
  mt.D = t * Da;
  const bool graded = m.grading.has_value();
  // levels below n: Ch(tD_a, tDdot_a)
  auto phi_low = [&](const Chain& x) -> Complex {
    if (!jlo_parity_ok(graded, x.level + 1) || x.level > n - 1) return 0.0;
    return pair(jlo_v(mt, t * Dd, opt), x);
  };
  // level n+1: -int_0^t Ch(uD_a, uDdot_a, D_a)(b x) du
  auto phi_top = [&](const Chain& x) -> Complex {
    Chain bx = boundary_b(x);
    std::function<Complex(double)> g = [&](double u) {
      UnboundedModule mu = m;
      mu.D = u * Da;
      return pair(jlo_vw(mu, u * Dd, Da, opt), bx);
    };
    return -integrate_panels<Complex>(g, 0.0, t, q.panels, q.order);
  };
  Complex rhs = 0.0;
  if (lvl >= 1) rhs += phi_low(boundary_b(c));
  Chain Bc = boundary_B(c);
  rhs += (lvl == n) ? phi_top(Bc) : phi_low(Bc);
  std::vector<double> hh = hs;
  if (alpha - hh[0] < 0 || alpha + hh[0] > 1) throw ParameterError("alpha +- h leaves [0,1]");
  auto fd = central_difference(f, rhs, hh);
  CheckReport r;
  r.name = "d_alpha_transgression";
  finish_fd(r, fd, std::max({std::abs(rhs), std::abs(f(0)), 1e-300}), 1e-8);
  return r;
}

CheckReport getzler_check(int instances, std::uint64_t seed, double delta, double eps) {
  Rng rng(seed);
  CheckReport r;
  r.name = "getzler";
  r.pass = true;
  int violations = 0;
  double worst = 0;
  for (int i = 0; i < instances; ++i) {
    int d = 2 + static_cast<int>(uniform(rng, 0, 3));
    TraceContext ctx({{d, uniform(rng, 0.2, 1.5)}});
    Matrix D = random_hermitian(ctx, rng);
    int n = static_cast<int>(uniform(rng, 1, 4));
    int k = std::min(n, static_cast<int>(uniform(rng, 0, 3)));
    Matrix Dabs = spectral_apply(ctx, D, [eps](double x) { return std::pow(std::abs(x), 1 + eps); });
    std::vector<Matrix> f;
    std::vector<double> Fn, Rn;
    if (i % 5 == 0) {
      // <a_0, [D,a_1], ..., [D,a_n]> with k = 0
      k = 0;
      f.push_back(random_affiliated(ctx, rng));
      for (int j = 1; j <= n; ++j) f.push_back(commutator(D, random_affiliated(ctx, rng)));
      for (const auto& x : f) {
        Fn.push_back(0);
        Rn.push_back(op_norm(x));
      }
    } else {
      for (int j = 0; j <= n; ++j) {
        Matrix R = random_affiliated(ctx, rng);
        Matrix F = j < k ? random_affiliated(ctx, rng) : Matrix::Zero(d, d);
        f.push_back(F * Dabs + R);
        Fn.push_back(op_norm(F));
        Rn.push_back(op_norm(R));
      }
    }
    HeatKernel hk(ctx, D);
    double lhs = std::abs(hk(f));
    double bound = getzler_bound(ctx, D, n, k, Fn, Rn, delta, eps);
    worst = std::max(worst, lhs / bound);
    if (lhs > bound) ++violations;
  }
  r.pass = violations == 0;
  r.residual = worst;
  r.values["violations"] = violations;
  r.values["worst_ratio"] = worst;
  r.values["delta"] = delta;
  r.values["eps"] = eps;
  return r;
}

}  // namespace breuer
