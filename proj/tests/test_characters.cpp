#include <doctest.h>

#include <cmath>

#include "breuer/characters.hpp"
#include "breuer/checks.hpp"
#include "breuer/random.hpp"
#include "breuer/suites.hpp"
#include "helpers.hpp"

using namespace breuer;
using testutil::diag;

namespace {

BoundedModule worked_example() {
  TraceContext ctx({{2, 1.0}});
  return BoundedModule{ctx, {diag({1, 0})}, testutil::flip(), testutil::grading({1, -1})};
}

}  // namespace

TEST_CASE("JLO at level 0 on the fractional example") {
  UnboundedModule m = type2_fractional_example().module;
  Cochain ch = jlo_cochain(m, 0);
  CHECK(pair(ch, Chain::elementary(m.ctx, {Matrix::Identity(3, 3)})).real() == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(std::abs(pair(ch, Chain::elementary(m.ctx, {Matrix::Zero(3, 3)}))) == 0.0);
}

TEST_CASE("JLO parity") {
  UnboundedModule m = type1_example().module;
  CHECK_THROWS_AS(jlo_cochain(m, 1), LevelError);
  CHECK_NOTHROW(jlo_cochain(m, 2));
  CHECK_THROWS_AS(jlo_cochain(odd_example().module, 0), LevelError);
}

TEST_CASE("JLO at level 2 against nested quadrature") {
  UnboundedModule m = random_graded_module(5, 1);
  Chain c = random_chains(m.ctx, 2, 1, 8, m.grading)[0];
  BracketOptions nq;
  nq.method = BracketMethod::nested_quadrature;
  Complex a = pair(jlo_cochain(m, 2), c), b = pair(jlo_cochain(m, 2, nq), c);
  CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
}

TEST_CASE("Connes character on the worked example") {
  BoundedModule m = worked_example();
  Chain c = Chain::elementary(m.ctx, {diag({1, 0})});
  CHECK(pair(connes_cochain(m, 0), c).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pair(psi_cochain(m, 0), boundary_B(c)).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Connes prefactor at level 2") {
  Rng rng(2);
  UnboundedModule u = random_graded_module(4);
  BoundedModule m = to_bounded(u);
  const Grading& g = *m.grading;
  std::vector<Matrix> a{random_even(m.ctx, g, rng), random_even(m.ctx, g, rng), random_even(m.ctx, g, rng)};
  Matrix chi = g.cast<Complex>().asDiagonal();
  Matrix prod = chi * m.F * commutator(m.F, a[0]) * commutator(m.F, a[1]) * commutator(m.F, a[2]);
  Complex direct = 0.25 * trace(m.ctx, prod);
  Complex v = pair(connes_cochain(m, 2), Chain::elementary(m.ctx, a));
  CHECK(std::abs(v - direct) < 1e-12 * std::max(1.0, std::abs(direct)));
}

TEST_CASE("Connes character needs F^2 = 1") {
  BoundedModule m = worked_example();
  m.F *= 2.0;
  CHECK_THROWS(connes_cochain(m, 0));
}

TEST_CASE("scalar slots give zero") {
  BoundedModule m = worked_example();
  Matrix I = Matrix::Identity(2, 2), p = diag({1, 0});
  CHECK(std::abs(m.ctx.tau_one()) > 0);
  CHECK(std::abs(connes_cochain(m, 2).eval({p, I, p})) < 1e-15);
  CHECK(std::abs(psi_cochain(m, 0).eval({p, I})) < 1e-15);
}

TEST_CASE("cocycle identities") {
  UnboundedModule g = random_graded_module(31);
  for (int n : {0, 2}) CHECK(jlo_cocycle_check(g, n, random_chains(g.ctx, n + 1, 2, 40 + n, g.grading)).pass);
  UnboundedModule u = random_ungraded_module(32);
  CHECK(jlo_cocycle_check(u, 1, random_chains(u.ctx, 2, 2, 50)).pass);
  BoundedModule b = to_bounded(g);
  CHECK(connes_cocycle_check(b, 0, random_chains(b.ctx, 0, 4, 60, b.grading), random_chains(b.ctx, 2, 4, 61, b.grading)).pass);
}

TEST_CASE("transgression identities") {
  Rng rng(70);
  UnboundedModule g = random_graded_module(71);
  Matrix V = random_odd_hermitian(g.ctx, *g.grading, rng), W = random_odd_hermitian(g.ctx, *g.grading, rng);
  CHECK(jlo_v_identity_check(g, V, random_chains(g.ctx, 2, 1, 72, g.grading)).pass);
  CHECK(jlo_vw_identity_check(g, V, W, random_chains(g.ctx, 1, 1, 73, g.grading)).pass);
  CheckReport cb = cobound_check(g, V, random_chains(g.ctx, 2, 1, 74, g.grading)[0]);
  CHECK(cb.pass);
  CHECK(cb.slope == doctest::Approx(2.0).epsilon(0.2));
  Cochain zero = jlo_v(g, Matrix::Zero(g.D.rows(), g.D.cols()));
  CHECK(std::abs(pair(zero, random_chains(g.ctx, 1, 1, 75, g.grading)[0])) == 0.0);
}

TEST_CASE("reduction scalar factor") {
  for (int n = 0; n <= 3; ++n)
    CHECK(reduction_scalar_factor(n) == doctest::Approx(std::tgamma(n / 2.0 + 1) / 2).epsilon(1e-10));
}

TEST_CASE("JLO limit reproduces the Connes character") {
  UnboundedModule t1 = type1_example().module;
  UnboundedModule f{t1.ctx, t1.generators, to_bounded(t1).F, t1.grading};
  Chain c = Chain::elementary(t1.ctx, {diag({1, 0})});
  LimitDiagnostics d;
  CHECK(pair(jlo_limit(f, 0, {}, {}, &d), c).real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.tail_bound < 1e-12);
  UnboundedModule g = random_graded_module(80);
  CHECK(reduction_check(g, 2, random_chains(g.ctx, 2, 1, 81, g.grading)).pass);
}

TEST_CASE("limit needs an invertible D") {
  UnboundedModule m = type2_fractional_example().module;
  CHECK_THROWS_AS(jlo_limit(m, 0), InvertibilityError);
}

TEST_CASE("Getzler bound") {
  TraceContext ctx({{2, 1.0}});
  CHECK(getzler_bound(ctx, Matrix::Zero(2, 2), 0, 0, {0.0}, {1.0}, 0.1, 0.1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(getzler_bound(ctx, Matrix::Zero(2, 2), 0, 0, {0.0}, {1.0}, 0.5, 0.1), ParameterError);
  CHECK(getzler_check(10, 4).pass);
}

TEST_CASE("index pairings through characters") {
  LibraryModule l = type1_example();
  BoundedModule b = to_bounded(l.module);
  for (int n : {0, 2, 4}) CHECK(connes_pairing_even(b, *l.p, 1, n).value == doctest::Approx(1.0).epsilon(1e-12));
  IndexReport j = jlo_pairing_even(l.module, *l.p, 1, 6);
  CHECK(std::abs(j.value - 1.0) <= j.diagnostics["tail_bound"] + 1e-12);
}
