#pragma once

#include <cstdint>
#include <random>

#include "breuer/semifinite.hpp"

namespace breuer {

using Rng = std::mt19937_64;

inline double gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

inline double uniform(Rng& rng, double a = 0.0, double b = 1.0) {
  std::uniform_real_distribution<double> u(a, b);
  return u(rng);
}

inline Matrix random_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = Complex(gaussian(rng), gaussian(rng));
  return m;
}

Matrix random_affiliated(const TraceContext& ctx, Rng& rng);
Matrix random_hermitian(const TraceContext& ctx, Rng& rng);
Matrix random_unitary(const TraceContext& ctx, Rng& rng);
// random orthogonal projection of roughly half rank in each block
Matrix random_projection(const TraceContext& ctx, Rng& rng);
TraceContext random_context(Rng& rng, int max_blocks, int max_dim);

// chi = +1 on the first ceil(d/2) basis vectors of each block
Grading balanced_grading(const TraceContext& ctx);
Matrix random_even(const TraceContext& ctx, const Grading& g, Rng& rng);
Matrix random_odd_hermitian(const TraceContext& ctx, const Grading& g, Rng& rng);
Matrix random_even_projection(const TraceContext& ctx, const Grading& g, Rng& rng);
// keeps eigenvectors, pushes eigenvalues away from zero
Matrix push_spectrum(const TraceContext& ctx, const Matrix& H, double min_abs);

}  // namespace breuer
