#include <doctest.h>

#include <cmath>

#include "breuer/fredholm.hpp"
#include "breuer/random.hpp"
#include "breuer/suites.hpp"
#include "helpers.hpp"

using namespace breuer;
using testutil::diag;

TEST_CASE("kernel index on the Type I example") {
  LibraryModule l = type1_example();
  BoundedModule b = to_bounded(l.module);
  CHECK(pairing_even_bounded(b, *l.p, 1).value == doctest::Approx(1.0).epsilon(1e-12));
  // e = f: index 0
  Matrix e = diag({1, 0});
  CHECK(ef_index_kernel(b.ctx, e, e, Matrix::Identity(2, 2)).value == doctest::Approx(0.0));
}

TEST_CASE("fractional example after doubling") {
  LibraryModule l = type2_fractional_example();
  UnboundedModule d = double_module(l.module);
  Matrix pd = double_projection(l.module.ctx, *l.p);
  BoundedModule b = to_bounded(d);
  CHECK(pairing_even_bounded(b, pd, 1).value == doctest::Approx(1.0 / 3).epsilon(1e-12));
  Matrix I = Matrix::Identity(pd.rows(), pd.cols());
  Matrix chi = b.grading->cast<Complex>().asDiagonal();
  Matrix e = pd * (I + chi) / 2.0, f = pd * (I - chi) / 2.0;
  Matrix S = pseudo_parametrix(b.ctx, e, f, b.F);
  for (int m : {1, 3}) CHECK(ef_index_parametrix(b.ctx, e, f, b.F, S, m).value == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("McKean-Singer") {
  LibraryModule l = type2_fractional_example();
  for (double t : {1.0, 0.25}) CHECK(mckean_singer(l.module, *l.p, 1, t).value == doctest::Approx(1.0 / 3).epsilon(1e-14));
  LibraryModule one = type1_example();
  double v = mckean_singer(one.module, *one.p, 1, 1.0).value;
  for (double t : {0.5, 2.0}) CHECK(mckean_singer(one.module, *one.p, 1, t).value == doctest::Approx(v).epsilon(1e-10));
}

TEST_CASE("doubling squares to D^2 + 1") {
  UnboundedModule m = random_graded_module(3);
  UnboundedModule d = double_module(m);
  Matrix D2 = m.D * m.D + Matrix::Identity(m.D.rows(), m.D.cols());
  Matrix expect = Matrix::Zero(d.D.rows(), d.D.cols());
  int off = 0, off2 = 0;
  for (int b = 0; b < m.ctx.num_blocks(); ++b) {
    int k = m.ctx.dim(b);
    Matrix x = D2.block(off, off, k, k);
    expect.block(off2, off2, k, k) = x;
    expect.block(off2 + k, off2 + k, k, k) = x;
    off += k;
    off2 += 2 * k;
  }
  CHECK((d.D * d.D - expect).norm() < 1e-10);
  CHECK(validate(d).pass);
}

TEST_CASE("to_bounded and the alpha = 1 endpoint") {
  UnboundedModule m = random_ungraded_module(6);
  BoundedModule b = to_bounded(m);
  CHECK((b.F * b.F - Matrix::Identity(b.F.rows(), b.F.cols())).norm() < 1e-12);
  CHECK((d_alpha(m, 1.0) - b.F).norm() < 1e-12);
  CHECK((d_alpha(m, 0.0) - m.D).norm() < 1e-12);
  CHECK(validate(b).pass);
}

TEST_CASE("non-invertible D") {
  UnboundedModule m = type2_fractional_example().module;
  CHECK_THROWS_AS(to_bounded(m), InvertibilityError);
  CHECK_THROWS_AS(require_invertible(m), InvertibilityError);
}

TEST_CASE("validation reports failures instead of throwing") {
  LibraryModule l = type1_example();
  UnboundedModule bad = l.module;
  bad.D(0, 1) = 0.5;
  ValidationReport r = validate(bad);
  CHECK_FALSE(r.pass);
  BoundedModule b = to_bounded(l.module);
  b.F *= 2.0;
  CHECK_FALSE(validate(b).pass);
}

TEST_CASE("spectral flow counts weighted crossings") {
  TraceContext ctx({{1, 0.5}, {2, 1.0}});
  std::vector<Matrix> path;
  for (int k = 0; k <= 10; ++k) {
    double s = k / 10.0;
    path.push_back(diag({-1 + 2 * s, 1 - 2 * s, 3.0}));
  }
  IndexReport r = spectral_flow(ctx, path);
  CHECK(r.value == doctest::Approx(0.5 - 1.0));
}

TEST_CASE("odd pairing on the consistency example") {
  LibraryModule l = odd_example();
  BoundedModule b = to_bounded(l.module);
  CHECK(std::abs(pairing_odd_bounded(b, *l.u, 1).value) < 1e-12);
  CHECK(std::abs(spectral_flow_to_conjugate(l.module, *l.u).value) < 1e-12);
}

TEST_CASE("inflated pairing") {
  LibraryModule l = type1_example();
  BoundedModule b = to_bounded(l.module);
  // p (x) e_11 in M_2(A)
  BoundedModule b2 = inflate(b, 2);
  Matrix p2 = Matrix::Zero(4, 4);
  p2(0, 0) = 1.0;
  CHECK(pairing_even_bounded(b, p2, 2).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b2.ctx.total_dim() == 4);
}

TEST_CASE("non-projection is rejected") {
  LibraryModule l = type1_example();
  BoundedModule b = to_bounded(l.module);
  CHECK_THROWS(pairing_even_bounded(b, diag({2, 0}), 1));
}

TEST_CASE("log constants") {
  CHECK(log_constant_C1() == doctest::Approx(M_PI).epsilon(1e-8));
  CHECK(std::abs(log_constant_C1prime()) < 1e-8);
}
