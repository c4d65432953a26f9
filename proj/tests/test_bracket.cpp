#include <doctest.h>

#include <cmath>

#include "breuer/bracket.hpp"
#include "breuer/checks.hpp"
#include "breuer/divided_difference.hpp"
#include "breuer/random.hpp"
#include "helpers.hpp"

using namespace breuer;
using testutil::diag;
using testutil::unit;

TEST_CASE("level 0 with balanced grading vanishes") {
  TraceContext ctx({{2, 1.0}});
  HeatKernel k(ctx, Matrix::Zero(2, 2), testutil::grading({1, -1}));
  CHECK(std::abs(k({Matrix::Identity(2, 2)})) < 1e-15);
}

TEST_CASE("scalar D, two unit factors") {
  const double c = 0.8;
  TraceContext ctx({{1, 1.0}});
  Matrix D = Matrix::Constant(1, 1, c), I = Matrix::Identity(1, 1);
  HeatKernel k(ctx, D);
  CHECK(std::abs(k({I, I}) - std::exp(-c * c)) < 1e-14);
}

TEST_CASE("off-diagonal units against the closed form") {
  const double mu = 2.0;
  TraceContext ctx({{2, 1.0}});
  Matrix D = diag({0, std::sqrt(mu)});
  std::vector<Matrix> f{unit(2, 0, 1), unit(2, 1, 0)};
  const double exact = (1 - std::exp(-mu)) / mu;
  HeatKernel k(ctx, D);
  CHECK(std::abs(k(f) - exact) < 1e-14);
  BracketOptions nq;
  nq.method = BracketMethod::nested_quadrature;
  CHECK(std::abs(k.bracket(f, nq) - exact) < 1e-8);
  BracketOptions mc;
  mc.method = BracketMethod::monte_carlo;
  CHECK(std::abs(k.bracket(f, mc) - exact) < 1e-2);
}

TEST_CASE("confluent spectrum") {
  // D^2 = 1 everywhere: the simplex integral is e^{-1}/n!
  TraceContext ctx({{2, 1.0}});
  HeatKernel k(ctx, testutil::flip());
  Matrix I = Matrix::Identity(2, 2);
  CHECK(std::abs(k({I, I, I}) - 2 * std::exp(-1.0) / 2) < 1e-14);
}

TEST_CASE("level cap") {
  TraceContext ctx({{1, 1.0}});
  HeatKernel k(ctx, Matrix::Zero(1, 1));
  std::vector<Matrix> f(8, Matrix::Identity(1, 1));
  CHECK_THROWS_AS(k(f), CapError);
}

TEST_CASE("non-self-adjoint D is rejected") {
  TraceContext ctx({{2, 1.0}});
  CHECK_THROWS_AS(HeatKernel(ctx, unit(2, 0, 1)), ValidationError);
}

TEST_CASE("three methods agree") {
  CheckReport r = bracket_agreement_check(10, 3, 100000);
  CHECK(r.pass);
}

TEST_CASE("bracket identities") {
  Rng rng(21);
  TraceContext ctx({{4, 0.8}, {2, 1.2}});
  Grading g = balanced_grading(ctx);
  Matrix D = random_odd_hermitian(ctx, g, rng);
  auto ev = [&] { return random_even(ctx, g, rng); };
  auto od = [&] { return random_odd_hermitian(ctx, g, rng); };
  CHECK(lemma_misc_check(ctx, D, g, {ev(), od(), od()}, LemmaVariant::cyclic).pass);
  CHECK(lemma_misc_check(ctx, D, g, {ev()}, LemmaVariant::insert_ones).pass);
  CHECK(lemma_misc_check(ctx, D, g, {ev(), od(), ev(), od()}, LemmaVariant::bracket_D).pass);
  std::vector<Matrix> f{random_affiliated(ctx, rng), random_affiliated(ctx, rng), random_affiliated(ctx, rng)};
  CHECK(lemma_misc_check(ctx, D, g, f, LemmaVariant::bracket_D2, 1).pass);
  CHECK_THROWS_AS(lemma_misc_check(ctx, D, g, f, LemmaVariant::bracket_D2, 2), ParameterError);
  CHECK_THROWS_AS(lemma_variant_from("nope"), ParameterError);
}

TEST_CASE("Duhamel derivative") {
  TraceContext one({{1, 1.0}});
  const double c = 0.8, v = 0.3;
  Matrix I = Matrix::Identity(1, 1);
  CheckReport r = duhamel_check(one, Matrix::Constant(1, 1, c), Matrix::Constant(1, 1, v), std::nullopt, {I, I});
  CHECK(r.pass);
  CHECK(r.values["rhs"] == doctest::Approx(2 * c * v * std::exp(-c * c)).epsilon(1e-12));
  CheckReport z = duhamel_check(one, Matrix::Constant(1, 1, c), Matrix::Zero(1, 1), std::nullopt, {I, I});
  CHECK(z.pass);
}

TEST_CASE("divided differences of exp(-x)") {
  CHECK(exp_divided_difference({0.0, 2.0}) == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-15));
  CHECK(exp_divided_difference({0.7, 0.7}) == doctest::Approx(std::exp(-0.7)).epsilon(1e-15));
  CHECK(exp_divided_difference({0.7, 0.7, 0.7}) == doctest::Approx(std::exp(-0.7) / 2).epsilon(1e-15));
  CHECK(exp_divided_difference({3.0, 0.0, 1.0}) == doctest::Approx(exp_divided_difference({0.0, 1.0, 3.0})).epsilon(1e-15));
  // nearly confluent nodes, where the naive recursion cancels
  CHECK(exp_divided_difference({1.0, 1.0 + 1e-9}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}
