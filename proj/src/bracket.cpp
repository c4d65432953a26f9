#include "breuer/bracket.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <unordered_map>

#include "breuer/divided_difference.hpp"
#include "breuer/quadrature.hpp"
#include "breuer/random.hpp"

namespace breuer {

struct HeatKernel::Cache {
  std::mutex mu;
  std::vector<std::unordered_map<std::uint64_t, double>> dd;  // per block
};

HeatKernel::HeatKernel(const TraceContext& ctx, const Matrix& D, std::optional<Grading> grading, double t,
                       BracketOptions options)
    : ctx_(ctx), D_(D), grading_(std::move(grading)), t_(t), options_(options) {
  require_affiliated(ctx_, D_, "D");
  require_self_adjoint(D_, "D");
  if (grading_) require_grading(ctx_, *grading_);
  if (!std::isfinite(t_)) throw ParameterError("bracket scale must be finite");
  BlockSpectrum sp = block_eigh(ctx_, D_);
  for (int b = 0; b < ctx_.num_blocks(); ++b) {
    RealVector l = sp.values[b].array().square() * (t_ * t_);
    lambda_.push_back(l);
    U_.push_back(sp.vectors[b]);
  }
  cache_ = std::make_shared<Cache>();
  cache_->dd.resize(ctx_.num_blocks());
}

Complex HeatKernel::operator()(const std::vector<Matrix>& factors) const { return bracket(factors, options_); }

std::vector<std::vector<Matrix>> HeatKernel::rotate(const std::vector<Matrix>& f) const {
  std::vector<std::vector<Matrix>> out(ctx_.num_blocks());
  for (size_t j = 0; j < f.size(); ++j) {
    Matrix m = f[j];
    if (j == 0 && grading_) m = grading_->asDiagonal() * m;
    for (int b = 0; b < ctx_.num_blocks(); ++b) out[b].push_back(U_[b].adjoint() * block_of(ctx_, m, b) * U_[b]);
  }
  return out;
}

Complex HeatKernel::bracket(const std::vector<Matrix>& factors, const BracketOptions& opt) const {
  if (factors.empty()) throw ParameterError("heat bracket needs at least one factor");
  const int n = static_cast<int>(factors.size()) - 1;
  if (n > opt.level_cap)
    throw CapError("bracket level " + std::to_string(n) + " exceeds cap " + std::to_string(opt.level_cap));
  if (ctx_.total_dim() > opt.dim_cap)
    throw CapError("dimension " + std::to_string(ctx_.total_dim()) + " exceeds cap " + std::to_string(opt.dim_cap));
  for (const auto& f : factors) require_affiliated(ctx_, f, "bracket factor");
  switch (opt.method) {
    case BracketMethod::divided_difference: return divided_difference(factors);
    case BracketMethod::nested_quadrature: return nested(factors, opt.rel_tol);
    case BracketMethod::monte_carlo: return monte_carlo(factors, opt.seed, opt.samples);
  }
  return 0.0;
}

namespace {

struct DDWalk {
  const std::vector<Matrix>* G;
  const RealVector* lambda;
  std::unordered_map<std::uint64_t, double>* shared;
  std::mutex* mu;
  std::unordered_map<std::uint64_t, double> local;
  std::vector<int> idx;
  int n;
  int d;
  CompensatedSum<Complex> acc;

  double dd(std::vector<int> ids) {
    std::sort(ids.begin(), ids.end());
    std::uint64_t key = 0;
    for (int i : ids) key = (key << 8) | static_cast<std::uint64_t>(i + 1);
    auto it = local.find(key);
    if (it != local.end()) return it->second;
    double v;
    {
      std::lock_guard<std::mutex> lock(*mu);
      auto s = shared->find(key);
      if (s != shared->end()) {
        v = s->second;
      } else {
        std::vector<double> nodes;
        for (int i : ids) nodes.push_back((*lambda)(i));
        v = exp_divided_difference(nodes);
        shared->emplace(key, v);
      }
    }
    local.emplace(key, v);
    return v;
  }

  void walk(int k, Complex partial) {
    // idx[0..k] fixed; next factor is G[k] from idx[k]
    if (k == n) {
      Complex v = partial * (*G)[n](idx[n], idx[0]);
      if (v != 0.0) acc.add(v * dd(idx));
      return;
    }
    for (int j = 0; j < d; ++j) {
      Complex p = partial * (*G)[k](idx[k], j);
      if (p == 0.0) continue;
      idx[k + 1] = j;
      walk(k + 1, p);
    }
  }
};

}  // namespace

Complex HeatKernel::divided_difference(const std::vector<Matrix>& f) const {
  const int n = static_cast<int>(f.size()) - 1;
  auto G = rotate(f);
  CompensatedSum<Complex> total;
  for (int b = 0; b < ctx_.num_blocks(); ++b) {
    const int d = ctx_.dim(b);
    if (d > 255) throw CapError("block dimension too large for the divided-difference path");
    DDWalk w{&G[b], &lambda_[b], &cache_->dd[b], &cache_->mu, {}, std::vector<int>(n + 1), n, d, {}};
    for (int i0 = 0; i0 < d; ++i0) {
      w.idx[0] = i0;
      w.walk(0, 1.0);
    }
    total.add(ctx_.weight(b) * w.acc.value());
  }
  return total.value();
}

Complex HeatKernel::nested(const std::vector<Matrix>& f, double rel_tol) const {
  const int n = static_cast<int>(f.size()) - 1;
  auto G = rotate(f);
  double scale = ctx_.tau_one();
  for (const auto& m : f) scale *= std::max(op_norm(m), 1e-300);
  const double abs_tol = 1e-3 * rel_tol * scale;
  CompensatedSum<Complex> total;
  for (int b = 0; b < ctx_.num_blocks(); ++b) {
    const RealVector& lam = lambda_[b];
    const auto& Gb = G[b];
    // P carries G_0 e^{-s_1 L} G_1 ... G_k
    std::function<Complex(int, double, const Matrix&)> level = [&](int k, double tprev, const Matrix& P) -> Complex {
      if (k > n) {
        RealVector e = (-(1.0 - tprev) * lam).array().exp();
        return (P.diagonal().array() * e.array().cast<Complex>()).sum();
      }
      std::function<Complex(double)> g = [&](double tk) -> Complex {
        RealVector e = (-(tk - tprev) * lam).array().exp();
        Matrix Q = P * e.asDiagonal() * Gb[k];
        return level(k + 1, tk, Q);
      };
      if (tprev >= 1.0) return 0.0;
      return integrate_adaptive<Complex>(g, tprev, 1.0, abs_tol, rel_tol, 400);
    };
    total.add(ctx_.weight(b) * level(1, 0.0, Gb[0]));
  }
  return total.value();
}

Complex HeatKernel::monte_carlo(const std::vector<Matrix>& f, std::uint64_t seed, long samples) const {
  const int n = static_cast<int>(f.size()) - 1;
  auto G = rotate(f);
  Rng rng(seed);
  std::exponential_distribution<double> ex(1.0);
  CompensatedSum<Complex> acc;
  std::vector<double> s(n + 1);
  for (long k = 0; k < samples; ++k) {
    double tot = 0;
    for (int j = 0; j <= n; ++j) {
      s[j] = ex(rng);
      tot += s[j];
    }
    for (int j = 0; j <= n; ++j) s[j] /= tot;
    Complex v = 0.0;
    for (int b = 0; b < ctx_.num_blocks(); ++b) {
      const RealVector& lam = lambda_[b];
      Matrix P = G[b][0];
      for (int j = 1; j <= n; ++j) {
        RealVector e = (-s[j - 1] * lam).array().exp();
        P = P * e.asDiagonal() * G[b][j];
      }
      RealVector e = (-s[n] * lam).array().exp();
      v += ctx_.weight(b) * (P.diagonal().array() * e.array().cast<Complex>()).sum();
    }
    acc.add(v);
  }
  return acc.value() / (static_cast<double>(samples) * std::tgamma(n + 1.0));
}

Complex heat_bracket(const HeatBracketRequest& req) {
  HeatKernel k(req.ctx, req.D, req.grading, req.t, req.options);
  return k(req.factors);
}

}  // namespace breuer
