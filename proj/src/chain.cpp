#include "breuer/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "breuer/random.hpp"

namespace breuer {

Chain Chain::elementary(const TraceContext& ctx, std::vector<Matrix> entries, Complex coeff) {
  if (entries.empty()) throw StructuralError("a chain term needs at least one entry");
  Chain c{ctx, static_cast<int>(entries.size()) - 1, {}};
  c.terms.push_back({coeff, std::move(entries)});
  return c;
}

void check_structure(const Chain& c) {
  const int d = c.ctx.total_dim();
  for (size_t t = 0; t < c.terms.size(); ++t) {
    const auto& e = c.terms[t].entries;
    if (static_cast<int>(e.size()) != c.level + 1)
      throw StructuralError("term " + std::to_string(t) + " has " + std::to_string(e.size()) +
                            " entries at level " + std::to_string(c.level));
    for (const auto& m : e)
      if (m.rows() != d || m.cols() != d)
        throw StructuralError("term " + std::to_string(t) + " has an entry outside the chain context");
  }
}

Chain boundary_b(const Chain& c) {
  check_structure(c);
  const int n = c.level;
  if (n == 0) return Chain::zero(c.ctx, 0);
  Chain out = Chain::zero(c.ctx, n - 1);
  for (const auto& t : c.terms) {
    const auto& a = t.entries;
    for (int j = 0; j < n; ++j) {
      std::vector<Matrix> e;
      e.reserve(n);
      for (int k = 0; k < j; ++k) e.push_back(a[k]);
      e.push_back(a[j] * a[j + 1]);
      for (int k = j + 2; k <= n; ++k) e.push_back(a[k]);
      out.terms.push_back({t.coeff * (j % 2 ? -1.0 : 1.0), std::move(e)});
    }
    std::vector<Matrix> e;
    e.push_back(a[n] * a[0]);
    for (int k = 1; k < n; ++k) e.push_back(a[k]);
    out.terms.push_back({t.coeff * (n % 2 ? -1.0 : 1.0), std::move(e)});
  }
  return out;
}

Chain boundary_B(const Chain& c) {
  check_structure(c);
  const int n = c.level;
  const int d = c.ctx.total_dim();
  Chain out = Chain::zero(c.ctx, n + 1);
  for (const auto& t : c.terms) {
    const auto& a = t.entries;
    for (int j = 0; j <= n; ++j) {
      std::vector<Matrix> e;
      e.reserve(n + 2);
      e.push_back(Matrix::Identity(d, d));
      for (int k = j; k <= n; ++k) e.push_back(a[k]);
      for (int k = 0; k < j; ++k) e.push_back(a[k]);
      double s = (n * j) % 2 ? -1.0 : 1.0;
      out.terms.push_back({t.coeff * s, std::move(e)});
    }
  }
  return canonicalize(out);
}

bool is_scalar(const TraceContext& ctx, const Matrix& a) {
  Complex lam = trace(ctx, a) / ctx.tau_one();
  Matrix r = a;
  r.diagonal().array() -= lam;
  return r.norm() <= 1e-12 * std::max(1.0, a.norm());
}

namespace {

bool same_entries(const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
  for (size_t i = 0; i < x.size(); ++i) {
    double scale = std::max(1.0, x[i].cwiseAbs().maxCoeff());
    if ((x[i] - y[i]).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  }
  return true;
}

}  // namespace

Chain canonicalize(const Chain& c) {
  check_structure(c);
  Chain out = Chain::zero(c.ctx, c.level);
  for (const auto& t : c.terms) {
    bool drop = false;
    for (size_t j = 1; j < t.entries.size() && !drop; ++j) drop = is_scalar(c.ctx, t.entries[j]);
    if (drop || t.coeff == 0.0) continue;
    bool merged = false;
    for (auto& o : out.terms) {
      if (same_entries(o.entries, t.entries)) {
        o.coeff += t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.terms.push_back(t);
  }
  double cmax = 0;
  for (const auto& t : out.terms) cmax = std::max(cmax, std::abs(t.coeff));
  std::erase_if(out.terms, [&](const Term& t) { return std::abs(t.coeff) <= 1e-15 * cmax; });
  return out;
}

Chain operator+(const Chain& x, const Chain& y) {
  if (x.level != y.level) throw StructuralError("cannot add chains of different levels");
  if (x.ctx != y.ctx) throw StructuralError("cannot add chains over different contexts");
  Chain out = x;
  out.terms.insert(out.terms.end(), y.terms.begin(), y.terms.end());
  return out;
}

Chain operator*(Complex s, const Chain& c) {
  Chain out = c;
  for (auto& t : out.terms) t.coeff *= s;
  return out;
}

Cochain zero_cochain() {
  Cochain z;
  z.eval = [](const std::vector<Matrix>&) { return Complex(0.0); };
  return z;
}

Complex pair(const Cochain& phi, const Chain& c) {
  check_structure(c);
  if (!phi.supports(c.level)) throw LevelError("cochain does not support level " + std::to_string(c.level));
  CompensatedSum<Complex> s;
  for (const auto& t : c.terms) s.add(t.coeff * phi.eval(t.entries));
  return s.value();
}

Cochain compose_b(const Cochain& phi, const TraceContext& ctx) {
  Cochain out;
  out.supports = [phi](int n) { return n >= 1 && phi.supports(n - 1); };
  out.eval = [phi, ctx](const std::vector<Matrix>& e) {
    return pair(phi, boundary_b(Chain::elementary(ctx, e)));
  };
  return out;
}

Cochain compose_B(const Cochain& phi, const TraceContext& ctx) {
  Cochain out;
  out.supports = [phi](int n) { return phi.supports(n + 1); };
  out.eval = [phi, ctx](const std::vector<Matrix>& e) {
    return pair(phi, boundary_B(Chain::elementary(ctx, e)));
  };
  return out;
}

Cochain test_cochain(const TraceContext& ctx, int max_level, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Matrix>> R(max_level + 1);
  std::vector<Complex> coeff(max_level + 1);
  for (int n = 0; n <= max_level; ++n) {
    coeff[n] = Complex(gaussian(rng), gaussian(rng));
    for (int j = 0; j <= n; ++j) {
      Matrix r = random_affiliated(ctx, rng);
      if (j >= 1) r.diagonal().array() -= trace(ctx, r) / ctx.tau_one();
      R[n].push_back(r);
    }
  }
  Cochain phi;
  phi.supports = [max_level](int n) { return n >= 0 && n <= max_level; };
  phi.eval = [R, coeff, ctx](const std::vector<Matrix>& e) {
    const int n = static_cast<int>(e.size()) - 1;
    Complex v = coeff[n];
    for (int j = 0; j <= n; ++j) v *= trace(ctx, R[n][j] * e[j]);
    return v;
  };
  return phi;
}

double chain_size(const Chain& c) {
  CompensatedSum<double> s;
  for (const auto& t : c.terms) {
    double p = std::abs(t.coeff);
    for (const auto& m : t.entries) p *= op_norm(m);
    s.add(p);
  }
  return s.value();
}

GrowthReport growth_report(const std::vector<Chain>& family, double lambda) {
  if (!(lambda > 0)) throw ParameterError("lambda must be positive");
  GrowthReport rep;
  for (const auto& c : family) {
    int n = c.level;
    // Gamma(0) is infinite, so level 0 contributes nothing
    double v = n == 0 ? 0.0 : chain_size(c) * std::pow(lambda, n) / std::tgamma(n / 2.0);
    rep.per_level.push_back(v);
    rep.sup = std::max(rep.sup, v);
  }
  return rep;
}

}  // namespace breuer
