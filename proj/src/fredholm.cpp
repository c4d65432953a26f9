#include "breuer/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "breuer/quadrature.hpp"

namespace breuer {

void ValidationReport::add(std::string name, double residual, double tol) {
  bool ok = residual <= tol;
  checks.push_back({std::move(name), residual, tol, ok});
  pass = pass && ok;
}

const char* to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::kernel: return "kernel";
    case IndexMethod::parametrix: return "parametrix";
    case IndexMethod::mckean_singer: return "mckean_singer";
    case IndexMethod::cohomological_connes: return "cohomological_connes";
    case IndexMethod::cohomological_jlo: return "cohomological_jlo";
    case IndexMethod::spectral_flow: return "spectral_flow";
  }
  return "?";
}

namespace {

double rel(double x, double scale) { return x / std::max(1.0, scale); }

template <class M>
void validate_common(ValidationReport& rep, const M& m, const Matrix& op, const char* name) {
  rep.add(std::string(name) + " affiliated", rel(affiliation_defect(m.ctx, op), op.norm()), 1e-10);
  for (size_t i = 0; i < m.generators.size(); ++i)
    rep.add("generator " + std::to_string(i) + " affiliated",
            rel(affiliation_defect(m.ctx, m.generators[i]), m.generators[i].norm()), 1e-10);
  if (m.grading) {
    const Grading& g = *m.grading;
    bool ok = g.size() == m.ctx.total_dim();
    for (int i = 0; ok && i < g.size(); ++i) ok = g(i) == 1.0 || g(i) == -1.0;
    rep.add("grading is a diagonal symmetry", ok ? 0.0 : 1.0, 0.0);
    if (!ok) return;
    Matrix gog = g.asDiagonal() * op * g.asDiagonal();
    rep.add(std::string(name) + " odd", rel((gog + op).norm(), op.norm()), 1e-10);
    for (size_t i = 0; i < m.generators.size(); ++i) {
      const Matrix& a = m.generators[i];
      Matrix gag = g.asDiagonal() * a * g.asDiagonal();
      rep.add("generator " + std::to_string(i) + " even", rel((gag - a).norm(), a.norm()), 1e-10);
    }
  }
}

}  // namespace

ValidationReport validate(const BoundedModule& m, const std::vector<double>& ps) {
  ValidationReport rep;
  if (m.F.rows() != m.ctx.total_dim() || m.F.cols() != m.ctx.total_dim()) {
    rep.add("F dimension", 1.0, 0.0);
    return rep;
  }
  Matrix I = Matrix::Identity(m.ctx.total_dim(), m.ctx.total_dim());
  rep.add("F^2 = 1", (m.F * m.F - I).norm(), 1e-10);
  rep.add("F self-adjoint", rel((m.F - m.F.adjoint()).norm(), m.F.norm()), 1e-10);
  validate_common(rep, m, m.F, "F");
  if (!rep.pass) return rep;
  for (double p : ps)
    for (size_t i = 0; i < m.generators.size(); ++i)
      rep.values["||[F,a_" + std::to_string(i) + "]||_" + std::to_string(p)] =
          p_norm(m.ctx, commutator(m.F, m.generators[i]), p);
  return rep;
}

ValidationReport validate(const UnboundedModule& m, const std::vector<double>& ps) {
  ValidationReport rep;
  if (m.D.rows() != m.ctx.total_dim() || m.D.cols() != m.ctx.total_dim()) {
    rep.add("D dimension", 1.0, 0.0);
    return rep;
  }
  rep.add("D self-adjoint", rel((m.D - m.D.adjoint()).norm(), m.D.norm()), 1e-10);
  validate_common(rep, m, m.D, "D");
  if (!rep.pass) return rep;
  for (size_t i = 0; i < m.generators.size(); ++i)
    rep.values["||[D,a_" + std::to_string(i) + "]||"] = op_norm(commutator(m.D, m.generators[i]));
  for (double p : ps) {
    Matrix r = spectral_apply(m.ctx, m.D, [p](double x) { return std::pow(1 + x * x, -p / 2); });
    rep.values["tau((1+D^2)^(-p/2)), p=" + std::to_string(p)] = trace(m.ctx, r).real();
  }
  return rep;
}

void require_projection(const TraceContext& ctx, const Matrix& p, const char* what) {
  require_affiliated(ctx, p, what);
  double s = std::max(1.0, p.norm());
  if ((p * p - p).norm() > 1e-9 * s || (p - p.adjoint()).norm() > 1e-9 * s)
    throw ValidationError(std::string(what) + " is not an orthogonal projection");
}

void require_unitary(const Matrix& u, const char* what) {
  Matrix I = Matrix::Identity(u.rows(), u.cols());
  if ((u.adjoint() * u - I).norm() > 1e-9 * std::max(1.0, u.norm()) || (u * u.adjoint() - I).norm() > 1e-9 * std::max(1.0, u.norm()))
    throw ValidationError(std::string(what) + " is not unitary");
}

namespace {

// orthonormal basis of the range of a projection block
Matrix range_basis(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((p + p.adjoint()) / 2.0);
  std::vector<int> keep;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  Matrix Q(p.rows(), keep.size());
  for (size_t k = 0; k < keep.size(); ++k) Q.col(k) = es.eigenvectors().col(keep[k]);
  return Q;
}

}  // namespace

IndexReport ef_index_kernel(const TraceContext& ctx, const Matrix& e, const Matrix& f, const Matrix& T,
                            double tol) {
  require_projection(ctx, e, "e");
  require_projection(ctx, f, "f");
  require_affiliated(ctx, T, "T");
  std::vector<Matrix> E, Fb;
  std::vector<RealVector> sv;
  double smax = 0;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    E.push_back(range_basis(block_of(ctx, e, b)));
    Fb.push_back(range_basis(block_of(ctx, f, b)));
    Matrix M = Fb.back().adjoint() * block_of(ctx, T, b) * E.back();
    RealVector s;
    if (M.size() > 0) s = Eigen::JacobiSVD<Matrix>(M).singularValues();
    if (s.size() > 0) smax = std::max(smax, s(0));
    sv.push_back(s);
  }
  double thr = tol * std::max(smax, op_norm(T));
  double ker = 0, coker = 0, ker_dim = 0, coker_dim = 0;
  double below = 0, above = std::numeric_limits<double>::infinity();
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    int rank = 0;
    for (int i = 0; i < sv[b].size(); ++i) {
      if (sv[b](i) > thr) {
        ++rank;
        above = std::min(above, sv[b](i));
      } else {
        below = std::max(below, sv[b](i));
      }
    }
    int ke = static_cast<int>(E[b].cols()) - rank;
    int kf = static_cast<int>(Fb[b].cols()) - rank;
    ker += ctx.weight(b) * ke;
    coker += ctx.weight(b) * kf;
    ker_dim += ke;
    coker_dim += kf;
  }
  IndexReport rep;
  rep.method = IndexMethod::kernel;
  rep.value = ker - coker;
  rep.diagnostics["kernel_weight"] = ker;
  rep.diagnostics["cokernel_weight"] = coker;
  rep.diagnostics["kernel_dim"] = ker_dim;
  rep.diagnostics["cokernel_dim"] = coker_dim;
  rep.diagnostics["threshold"] = thr;
  rep.diagnostics["largest_below_threshold"] = below;
  rep.diagnostics["smallest_above_threshold"] = std::isinf(above) ? -1.0 : above;
  return rep;
}

Matrix pseudo_parametrix(const TraceContext& ctx, const Matrix& e, const Matrix& f, const Matrix& T, double tol) {
  require_affiliated(ctx, T, "T");
  Matrix M = f * T * e;
  double thr = tol * std::max(op_norm(M), op_norm(T));
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    Eigen::JacobiSVD<Matrix> svd(block_of(ctx, M, b), Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector s = svd.singularValues();
    RealVector inv = RealVector::Zero(s.size());
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > thr) inv(i) = 1.0 / s(i);
    blocks.push_back(svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint());
  }
  return assemble(ctx, blocks);
}

IndexReport ef_index_parametrix(const TraceContext& ctx, const Matrix& e, const Matrix& f, const Matrix& T,
                                const Matrix& S, int m) {
  if (m < 1) throw ParameterError("parametrix power m must be >= 1");
  Matrix a = e - e * S * f * T * e;
  Matrix c = f - f * T * e * S * f;
  Matrix am = a, cm = c;
  for (int k = 1; k < m; ++k) {
    am = am * a;
    cm = cm * c;
  }
  IndexReport rep;
  rep.method = IndexMethod::parametrix;
  Complex v = trace(ctx, am) - trace(ctx, cm);
  rep.value = v.real();
  rep.diagnostics["imag"] = v.imag();
  rep.diagnostics["m"] = m;
  return rep;
}

BoundedModule inflate(const BoundedModule& m, int N) {
  BoundedModule out{m.ctx.inflate(N), {}, inflate(m.ctx, m.F, N), std::nullopt};
  for (const auto& a : m.generators) out.generators.push_back(inflate(m.ctx, a, N));
  if (m.grading) out.grading = inflate(m.ctx, *m.grading, N);
  return out;
}

UnboundedModule inflate(const UnboundedModule& m, int N) {
  UnboundedModule out{m.ctx.inflate(N), {}, inflate(m.ctx, m.D, N), std::nullopt};
  for (const auto& a : m.generators) out.generators.push_back(inflate(m.ctx, a, N));
  if (m.grading) out.grading = inflate(m.ctx, *m.grading, N);
  return out;
}

IndexReport pairing_even_bounded(const BoundedModule& m, const Matrix& p, int N, double tol) {
  if (!m.grading) throw ValidationError("even pairing needs a graded module");
  BoundedModule mN = inflate(m, N);
  require_projection(mN.ctx, p, "p");
  const Grading& g = *mN.grading;
  if (parity_of(p, g, 1e-9) != Parity::even) throw ValidationError("p is not even");
  Matrix pp = p * (Matrix::Identity(p.rows(), p.cols()) + Matrix(g.asDiagonal())) / 2.0;
  Matrix pm = p * (Matrix::Identity(p.rows(), p.cols()) - Matrix(g.asDiagonal())) / 2.0;
  return ef_index_kernel(mN.ctx, pp, pm, mN.F, tol);
}

IndexReport pairing_odd_bounded(const BoundedModule& m, const Matrix& u, int N, double tol) {
  BoundedModule mN = inflate(m, N);
  require_affiliated(mN.ctx, u, "u");
  require_unitary(u, "u");
  Matrix I = Matrix::Identity(u.rows(), u.cols());
  if ((mN.F * mN.F - I).norm() > 1e-9) throw ValidationError("F^2 != 1");
  Matrix Q = (mN.F + I) / 2.0;
  return ef_index_kernel(mN.ctx, Q, Q, u, tol);
}

IndexReport mckean_singer(const UnboundedModule& m, const Matrix& p, int N, double t) {
  if (!m.grading) throw ValidationError("McKean-Singer needs a graded module");
  if (!(t > 0)) throw ParameterError("t must be positive");
  UnboundedModule mN = inflate(m, N);
  require_projection(mN.ctx, p, "p");
  if (parity_of(p, *mN.grading, 1e-9) != Parity::even) throw ValidationError("p is not even");
  Matrix I = Matrix::Identity(p.rows(), p.cols());
  Matrix D1 = p * mN.D * p + (I - p) * mN.D * (I - p);
  D1 = (D1 + D1.adjoint()) / 2.0;
  Matrix heat = spectral_apply(mN.ctx, D1, [t](double x) { return std::exp(-t * x * x); });
  Complex v = trace(mN.ctx, mN.grading->asDiagonal() * p * heat);
  IndexReport rep;
  rep.method = IndexMethod::mckean_singer;
  rep.value = v.real();
  rep.diagnostics["imag"] = v.imag();
  rep.diagnostics["t"] = t;
  rep.diagnostics["||[D,p]||"] = op_norm(commutator(mN.D, p));
  return rep;
}

IndexReport spectral_flow(const TraceContext& ctx, const std::vector<Matrix>& path) {
  if (path.size() < 2) throw ParameterError("spectral flow needs at least two path points");
  std::vector<BlockSpectrum> specs;
  for (const auto& D : path) {
    require_self_adjoint(D, "path point");
    specs.push_back(block_eigh(ctx, D));
  }
  double flow = 0, up = 0, down = 0;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    for (size_t k = 0; k + 1 < path.size(); ++k) {
      const RealVector& l0 = specs[k].values[b];
      const RealVector& l1 = specs[k + 1].values[b];
      double scale = std::max({1.0, l0.cwiseAbs().maxCoeff(), l1.cwiseAbs().maxCoeff()});
      double gap = std::numeric_limits<double>::infinity();
      for (int i = 0; i + 1 < l0.size(); ++i) {
        double g = l0(i + 1) - l0(i);
        if (g > 1e-12 * scale) gap = std::min(gap, g);
      }
      for (int i = 0; i < l0.size(); ++i) {
        if (std::abs(l1(i) - l0(i)) > 0.5 * gap)
          throw RefinementError("eigenvalue moved more than half the spectral gap between steps " +
                                std::to_string(k) + " and " + std::to_string(k + 1) + "; refine the path");
        if (l0(i) < 0 && l1(i) >= 0) {
          up += ctx.weight(b);
          flow += ctx.weight(b);
        } else if (l0(i) >= 0 && l1(i) < 0) {
          down += ctx.weight(b);
          flow -= ctx.weight(b);
        }
      }
    }
  }
  IndexReport rep;
  rep.method = IndexMethod::spectral_flow;
  rep.value = flow;
  rep.diagnostics["up_weight"] = up;
  rep.diagnostics["down_weight"] = down;
  rep.diagnostics["steps"] = static_cast<double>(path.size() - 1);
  return rep;
}

void require_invertible(const UnboundedModule& m) {
  require_self_adjoint(m.D, "D");
  BlockSpectrum sp = block_eigh(m.ctx, m.D);
  double mn = std::numeric_limits<double>::infinity(), mx = 0;
  for (const auto& v : sp.values) {
    mn = std::min(mn, v.cwiseAbs().minCoeff());
    mx = std::max(mx, v.cwiseAbs().maxCoeff());
  }
  if (!(mn > 1e-8 * mx) || mx == 0)
    throw InvertibilityError("D is not invertible (min |eigenvalue| = " + std::to_string(mn) +
                             "); apply double() first");
}


BoundedModule to_bounded(const UnboundedModule& m) {
  require_invertible(m);
  BoundedModule out{m.ctx, m.generators, spectral_apply(m.ctx, m.D, [](double x) { return x > 0 ? 1.0 : -1.0; }),
                    m.grading};
  return out;
}

UnboundedModule double_module(const UnboundedModule& m) {
  require_self_adjoint(m.D, "D");
  std::vector<Block> blocks;
  for (const auto& b : m.ctx.blocks()) blocks.push_back({2 * b.dim, b.weight});
  TraceContext ctx2(blocks);
  std::vector<Matrix> Db;
  for (int b = 0; b < m.ctx.num_blocks(); ++b) {
    int d = m.ctx.dim(b);
    Matrix Dx = block_of(m.ctx, m.D, b);
    Matrix out = Matrix::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = Dx;
    out.bottomRightCorner(d, d) = -Dx;
    out.topRightCorner(d, d) = Matrix::Identity(d, d);
    out.bottomLeftCorner(d, d) = Matrix::Identity(d, d);
    Db.push_back(out);
  }
  UnboundedModule out{ctx2, {}, assemble(ctx2, Db), std::nullopt};
  for (const auto& a : m.generators) out.generators.push_back(double_projection(m.ctx, a));
  if (m.grading) {
    Grading g(ctx2.total_dim());
    for (int b = 0; b < m.ctx.num_blocks(); ++b) {
      int d = m.ctx.dim(b);
      g.segment(ctx2.offset(b), d) = m.grading->segment(m.ctx.offset(b), d);
      g.segment(ctx2.offset(b) + d, d) = -m.grading->segment(m.ctx.offset(b), d);
    }
    out.grading = g;
  }
  return out;
}

Matrix double_projection(const TraceContext& ctx, const Matrix& p) {
  std::vector<Block> blocks;
  for (const auto& b : ctx.blocks()) blocks.push_back({2 * b.dim, b.weight});
  TraceContext ctx2(blocks);
  std::vector<Matrix> out;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    int d = ctx.dim(b);
    Matrix x = Matrix::Zero(2 * d, 2 * d);
    x.topLeftCorner(d, d) = block_of(ctx, p, b);
    out.push_back(x);
  }
  return assemble(ctx2, out);
}

Matrix d_alpha(const UnboundedModule& m, double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) throw ParameterError("alpha must lie in [0,1]");
  require_invertible(m);
  return spectral_apply(m.ctx, m.D, [alpha](double x) { return x * std::pow(std::abs(x), -alpha); });
}

Matrix d_alpha_dot(const UnboundedModule& m, double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) throw ParameterError("alpha must lie in [0,1]");
  require_invertible(m);
  return spectral_apply(m.ctx, m.D, [alpha](double x) {
    double ax = std::abs(x);
    return -x * std::pow(ax, -alpha) * std::log(ax);
  });
}

InterpolationReport interpolation_bound_check(const UnboundedModule& m, const Matrix& a, double alpha, double p) {
  if (!(p > 0)) throw ParameterError("p must be positive");
  Matrix Da = d_alpha(m, alpha);
  InterpolationReport rep;
  double q = alpha == 0 ? std::numeric_limits<double>::infinity() : p / alpha;
  rep.lhs = p_norm(m.ctx, commutator(Da, a), q);
  double da = op_norm(commutator(m.D, a));
  double Cp = p_norm(m.ctx, spectral_apply(m.ctx, m.D, [](double x) { return 1 / std::sqrt(1 + x * x); }), p);
  double Ci = p_norm(m.ctx, spectral_apply(m.ctx, m.D, [](double x) { return 1 / std::abs(x); }), p);
  rep.rhs = da * std::pow(Cp, alpha);
  rep.rhs_inverse = da * std::pow(Ci, alpha);
  rep.pass = rep.lhs <= rep.rhs * (1 + 1e-10) + 1e-300;
  rep.pass_inverse = rep.lhs <= rep.rhs_inverse * (1 + 1e-10) + 1e-300;
  return rep;
}

// x = y^2 turns both into integrals with a smooth (or log) integrand on [0, inf)
double log_constant_C1() {
  std::function<double(double)> f = [](double y) { return 2.0 / (1 + y * y); };
  return integrate_to_infinity<double>(f, 0.0, 1e-14, 1e-14);
}

double log_constant_C1prime() {
  std::function<double(double)> f = [](double y) { return y == 0 ? 0.0 : 4.0 * std::log(y) / (1 + y * y); };
  return integrate_to_infinity<double>(f, 0.0, 1e-14, 1e-14, 4000);
}

LogCommutatorReport log_commutator_check(const UnboundedModule& m, const Matrix& a) {
  BoundedModule bm = to_bounded(m);
  Matrix L = spectral_apply(m.ctx, m.D, [](double x) { return std::log(std::abs(x)); });
  Matrix Dinv = spectral_apply(m.ctx, m.D, [](double x) { return 1 / std::abs(x); });
  Matrix DinvL = spectral_apply(m.ctx, m.D, [](double x) { return std::log(std::abs(x)) / std::abs(x); });
  LogCommutatorReport rep;
  rep.C1 = log_constant_C1();
  rep.C1prime = log_constant_C1prime();
  rep.lhs = op_norm(commutator(bm.F * L, a));
  rep.rhs = 0.5 * op_norm(commutator(m.D, a)) * (op_norm(DinvL) + rep.C1prime / rep.C1 * op_norm(Dinv)) +
            rep.C1prime / (2 * rep.C1) * op_norm(commutator(bm.F, a));
  rep.pass = rep.lhs <= rep.rhs * (1 + 1e-10) + 1e-300;
  return rep;
}

BoundReport perturbation_bound_check(const UnboundedModule& m, const Matrix& V, double eps) {
  if (!(eps > 0 && eps < 1)) throw ParameterError("epsilon must lie in (0,1)");
  require_self_adjoint(V, "V");
  require_affiliated(m.ctx, V, "V");
  if (m.grading && parity_of(V, *m.grading) != Parity::odd && V.norm() > 0)
    throw ValidationError("V must be odd like D");
  BoundReport rep;
  rep.lhs = heat_trace(m.ctx, m.D + V, 1 - eps / 2);
  double v = op_norm(V);
  rep.rhs = std::exp((1 + 2 / eps) * v * v) * heat_trace(m.ctx, m.D, 1 - eps);
  rep.pass = rep.lhs <= rep.rhs * (1 + 1e-12);
  return rep;
}

}  // namespace breuer
