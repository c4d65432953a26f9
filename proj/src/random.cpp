#include "breuer/random.hpp"

#include <cmath>

namespace breuer {

Matrix random_affiliated(const TraceContext& ctx, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) blocks.push_back(random_matrix(rng, ctx.dim(b), ctx.dim(b)));
  return assemble(ctx, blocks);
}

Matrix random_hermitian(const TraceContext& ctx, Rng& rng) {
  Matrix a = random_affiliated(ctx, rng);
  return (a + a.adjoint()) / 2.0;
}

Matrix random_unitary(const TraceContext& ctx, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    Matrix m = random_matrix(rng, ctx.dim(b), ctx.dim(b));
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    blocks.push_back(q);
  }
  return assemble(ctx, blocks);
}

Matrix random_projection(const TraceContext& ctx, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    int d = ctx.dim(b);
    int r = std::max(1, d / 2);
    Matrix m = random_matrix(rng, d, r);
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = Matrix(qr.householderQ()).leftCols(r);
    blocks.push_back(q * q.adjoint());
  }
  return assemble(ctx, blocks);
}

TraceContext random_context(Rng& rng, int max_blocks, int max_dim) {
  std::uniform_int_distribution<int> nb(1, max_blocks), nd(1, max_dim);
  std::vector<Block> blocks;
  int k = nb(rng);
  for (int i = 0; i < k; ++i) blocks.push_back({nd(rng), uniform(rng, 0.2, 1.5)});
  return TraceContext(blocks);
}

Grading balanced_grading(const TraceContext& ctx) {
  Grading g(ctx.total_dim());
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    int d = ctx.dim(b);
    int plus = (d + 1) / 2;
    for (int i = 0; i < d; ++i) g(ctx.offset(b) + i) = i < plus ? 1.0 : -1.0;
  }
  return g;
}

Matrix random_even(const TraceContext& ctx, const Grading& g, Rng& rng) {
  Matrix a = random_affiliated(ctx, rng);
  return (a + g.asDiagonal() * a * g.asDiagonal()) / 2.0;
}

Matrix random_odd_hermitian(const TraceContext& ctx, const Grading& g, Rng& rng) {
  Matrix a = random_hermitian(ctx, rng);
  return (a - g.asDiagonal() * a * g.asDiagonal()) / 2.0;
}

Matrix random_even_projection(const TraceContext& ctx, const Grading& g, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < ctx.num_blocks(); ++b) {
    int d = ctx.dim(b);
    Matrix pb = Matrix::Zero(d, d);
    std::vector<int> plus, minus;
    for (int i = 0; i < d; ++i) (g(ctx.offset(b) + i) > 0 ? plus : minus).push_back(i);
    for (auto* part : {&plus, &minus}) {
      int n = static_cast<int>(part->size());
      if (n == 0) continue;
      int r = std::max(1, n / 2);
      Matrix m = random_matrix(rng, n, r);
      Eigen::HouseholderQR<Matrix> qr(m);
      Matrix q = Matrix(qr.householderQ()).leftCols(r);
      Matrix proj = q * q.adjoint();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pb((*part)[i], (*part)[j]) = proj(i, j);
    }
    blocks.push_back(pb);
  }
  return assemble(ctx, blocks);
}

Matrix push_spectrum(const TraceContext& ctx, const Matrix& H, double min_abs) {
  return spectral_apply(ctx, H, [min_abs](double x) {
    if (std::abs(x) >= min_abs) return x;
    return x >= 0 ? min_abs : -min_abs;
  });
}

}  // namespace breuer
