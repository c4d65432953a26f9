#include "breuer/semifinite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace breuer {

TraceContext::TraceContext(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ContextError("context needs at least one block");
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw ContextError("block dimension must be >= 1");
    if (!(b.weight > 0) || !std::isfinite(b.weight))
      throw ContextError("block weight must be positive and finite");
    offsets_.push_back(total_);
    total_ += b.dim;
  }
}

double TraceContext::tau_one() const {
  CompensatedSum<double> s;
  for (const auto& b : blocks_) s.add(b.weight * b.dim);
  return s.value();
}

RealVector TraceContext::basis_weights() const {
  RealVector w(total_);
  for (int b = 0; b < num_blocks(); ++b) w.segment(offsets_[b], blocks_[b].dim).setConstant(blocks_[b].weight);
  return w;
}

TraceContext TraceContext::inflate(int N) const {
  if (N < 1) throw ParameterError("inflation factor must be >= 1");
  std::vector<Block> out;
  for (const auto& b : blocks_) out.push_back({b.dim * N, b.weight});
  return TraceContext(out);
}

bool TraceContext::operator==(const TraceContext& o) const {
  if (blocks_.size() != o.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].dim != o.blocks_[i].dim || blocks_[i].weight != o.blocks_[i].weight) return false;
  return true;
}

Matrix block_of(const TraceContext& ctx, const Matrix& T, int b) {
  return T.block(ctx.offset(b), ctx.offset(b), ctx.dim(b), ctx.dim(b));
}

Matrix assemble(const TraceContext& ctx, const std::vector<Matrix>& blocks) {
  Matrix out = Matrix::Zero(ctx.total_dim(), ctx.total_dim());
  for (int b = 0; b < ctx.num_blocks(); ++b)
    out.block(ctx.offset(b), ctx.offset(b), ctx.dim(b), ctx.dim(b)) = blocks[b];
  return out;
}

double affiliation_defect(const TraceContext& ctx, const Matrix& T) {
  if (T.rows() != ctx.total_dim() || T.cols() != ctx.total_dim())
    throw ContextError("operator is " + std::to_string(T.rows()) + "x" + std::to_string(T.cols()) +
                       ", context dimension is " + std::to_string(ctx.total_dim()));
  Matrix off = T;
  for (int b = 0; b < ctx.num_blocks(); ++b)
    off.block(ctx.offset(b), ctx.offset(b), ctx.dim(b), ctx.dim(b)).setZero();
  return off.norm();
}

void require_affiliated(const TraceContext& ctx, const Matrix& T, const char* what) {
  double d = affiliation_defect(ctx, T);
  if (d > 1e-10 * std::max(1.0, T.norm()))
    throw ContextError(std::string(what) + " is not block-diagonal for the context");
}

bool is_self_adjoint(const Matrix& T, double rel) {
  return (T - T.adjoint()).norm() <= rel * std::max(1.0, T.norm());
}

void require_self_adjoint(const Matrix& T, const char* what) {
  if (!is_self_adjoint(T)) throw ValidationError(std::string(what) + " is not self-adjoint");
}

void require_grading(const TraceContext& ctx, const Grading& g) {
  if (g.size() != ctx.total_dim()) throw ContextError("grading length does not match context");
  for (int i = 0; i < g.size(); ++i)
    if (g(i) != 1.0 && g(i) != -1.0) throw ValidationError("grading entries must be +1 or -1");
}

Parity parity_of(const Matrix& T, const Grading& g, double tol) {
  Matrix gTg = g.asDiagonal() * T * g.asDiagonal();
  double scale = std::max(1.0, T.norm());
  if ((gTg - T).norm() <= tol * scale) return Parity::even;
  if ((gTg + T).norm() <= tol * scale) return Parity::odd;
  return Parity::unassigned;
}

Matrix inflate(const TraceContext& ctx, const Matrix& a, int N) {
  TraceContext big = ctx.inflate(N);
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    Matrix ab = block_of(ctx, a, b);
    int d = ctx.dim(b);
    Matrix out = Matrix::Zero(N * d, N * d);
    for (int k = 0; k < N; ++k) out.block(k * d, k * d, d, d) = ab;
    blocks.push_back(out);
  }
  return assemble(big, blocks);
}

Grading inflate(const TraceContext& ctx, const Grading& g, int N) {
  Grading out(ctx.total_dim() * N);
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    int d = ctx.dim(b);
    for (int k = 0; k < N; ++k) out.segment(ctx.offset(b) * N + k * d, d) = g.segment(ctx.offset(b), d);
  }
  return out;
}

Complex trace(const TraceContext& ctx, const Matrix& T) {
  if (T.rows() != ctx.total_dim() || T.cols() != ctx.total_dim())
    throw ContextError("trace: dimension mismatch");
  CompensatedSum<Complex> s;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    CompensatedSum<Complex> sb;
    for (int i = 0; i < ctx.dim(b); ++i) sb.add(T(ctx.offset(b) + i, ctx.offset(b) + i));
    s.add(ctx.weight(b) * sb.value());
  }
  return s.value();
}

namespace {

std::vector<std::pair<double, double>> weighted_singular_values(const TraceContext& ctx, const Matrix& T) {
  require_affiliated(ctx, T, "operator");
  std::vector<std::pair<double, double>> out;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    Eigen::JacobiSVD<Matrix> svd(block_of(ctx, T, b));
    const RealVector& s = svd.singularValues();
    for (int i = 0; i < s.size(); ++i) out.push_back({s(i), ctx.weight(b)});
  }
  return out;
}

}  // namespace

double p_norm(const TraceContext& ctx, const Matrix& T, double p) {
  if (!(p > 0)) throw ParameterError("p must be positive");
  auto sv = weighted_singular_values(ctx, T);
  if (std::isinf(p)) {
    double m = 0;
    for (auto& [s, w] : sv) m = std::max(m, s);
    return m;
  }
  CompensatedSum<double> acc;
  for (auto& [s, w] : sv) acc.add(w * std::pow(s, p));
  return std::pow(acc.value(), 1.0 / p);
}

double SingularProfile::value_at(double x) const {
  double cum = 0;
  for (auto& [v, w] : steps) {
    cum += w;
    if (x < cum) return v;
  }
  return 0.0;
}

double SingularProfile::integral() const {
  return integral([](double v) { return v; });
}

double SingularProfile::integral(std::function<double(double)> f) const {
  CompensatedSum<double> s;
  for (auto& [v, w] : steps) s.add(f(v) * w);
  return s.value();
}

double SingularProfile::total_weight() const {
  CompensatedSum<double> s;
  for (auto& [v, w] : steps) s.add(w);
  return s.value();
}

SingularProfile singular_profile(const TraceContext& ctx, const Matrix& T) {
  auto sv = weighted_singular_values(ctx, T);
  std::stable_sort(sv.begin(), sv.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double top = sv.empty() ? 0.0 : sv.front().first;
  double thr = 1e-12 * top;
  SingularProfile prof;
  for (auto& [s, w] : sv) {
    if (!prof.steps.empty() && std::abs(prof.steps.back().first - s) <= thr)
      prof.steps.back().second += w;
    else
      prof.steps.push_back({s, w});
  }
  return prof;
}

BoundReport holder_check(const TraceContext& ctx, const Matrix& T, const Matrix& S, double p,
                         double q, double r) {
  if (!(p > 0 && q > 0 && r > 0)) throw ParameterError("Hoelder exponents must be positive");
  if (std::abs(1 / p + 1 / q - 1 / r) > 1e-12) throw ParameterError("exponents violate 1/p+1/q=1/r");
  BoundReport rep;
  rep.lhs = p_norm(ctx, T * S, r);
  rep.rhs = p_norm(ctx, T, p) * p_norm(ctx, S, q);
  rep.pass = rep.lhs <= rep.rhs * (1 + 1e-10) + 1e-300;
  return rep;
}

BoundReport triangle_check(const TraceContext& ctx, const Matrix& T, const Matrix& S, double p) {
  if (!(p >= 1)) throw ParameterError("triangle inequality needs p >= 1");
  BoundReport rep;
  rep.lhs = p_norm(ctx, T + S, p);
  rep.rhs = p_norm(ctx, T, p) + p_norm(ctx, S, p);
  rep.pass = rep.lhs <= rep.rhs * (1 + 1e-10) + 1e-300;
  return rep;
}

BoundReport str_check(const TraceContext& ctx, const Matrix& S, const Matrix& T, const Matrix& R,
                      double p) {
  BoundReport rep;
  rep.lhs = p_norm(ctx, S * T * R, p);
  rep.rhs = op_norm(S) * op_norm(R) * p_norm(ctx, T, p);
  rep.pass = rep.lhs <= rep.rhs * (1 + 1e-10) + 1e-300;
  return rep;
}

BlockSpectrum block_eigh(const TraceContext& ctx, const Matrix& H) {
  require_affiliated(ctx, H, "operator");
  BlockSpectrum out;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    Matrix hb = block_of(ctx, H, b);
    hb = (hb + hb.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hb);
    out.values.push_back(es.eigenvalues());
    out.vectors.push_back(es.eigenvectors());
  }
  return out;
}

Matrix spectral_apply(const TraceContext& ctx, const Matrix& H, const std::function<double(double)>& f) {
  require_self_adjoint(H, "operator");
  BlockSpectrum sp = block_eigh(ctx, H);
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    RealVector fv = sp.values[b].unaryExpr(f);
    blocks.push_back(sp.vectors[b] * fv.asDiagonal() * sp.vectors[b].adjoint());
  }
  return assemble(ctx, blocks);
}

double heat_trace(const TraceContext& ctx, const Matrix& D, double t) {
  if (!(t > 0)) throw ParameterError("t must be positive");
  require_self_adjoint(D, "D");
  BlockSpectrum sp = block_eigh(ctx, D);
  CompensatedSum<double> s;
  for (int b = 0; b < ctx.num_blocks(); ++b)
    for (int i = 0; i < sp.values[b].size(); ++i)
      s.add(ctx.weight(b) * std::exp(-t * sp.values[b](i) * sp.values[b](i)));
  return s.value();
}

namespace {

double resolvent_power_trace(const TraceContext& ctx, const Matrix& D, double p) {
  BlockSpectrum sp = block_eigh(ctx, D);
  CompensatedSum<double> s;
  for (int b = 0; b < ctx.num_blocks(); ++b)
    for (int i = 0; i < sp.values[b].size(); ++i)
      s.add(ctx.weight(b) * std::pow(1 + sp.values[b](i) * sp.values[b](i), -p / 2));
  return s.value();
}

}  // namespace

double ptheta_bound(const TraceContext& ctx, const Matrix& D, double p, double t) {
  return std::pow(p / (2 * M_E), p / 2) * std::pow(t, -p / 2) * std::exp(t) *
         resolvent_power_trace(ctx, D, p);
}

SummabilityReport summability_report(const TraceContext& ctx, const Matrix& D, double p,
                                     std::vector<double> ts) {
  if (!(p > 0)) throw ParameterError("p must be positive");
  require_self_adjoint(D, "D");
  if (ts.empty())
    for (int k = 1; k <= 10; ++k) ts.push_back(0.1 * k);
  SummabilityReport rep;
  rep.p_value = resolvent_power_trace(ctx, D, p);
  for (double t : ts) {
    double h = heat_trace(ctx, D, t);
    double bd = ptheta_bound(ctx, D, p, t);
    rep.t.push_back(t);
    rep.heat.push_back(h);
    rep.bound.push_back(bd);
    if (h > bd * (1 + 1e-12)) rep.ptheta_bound_pass = false;
  }
  return rep;
}

}  // namespace breuer
