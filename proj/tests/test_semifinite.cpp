#include <doctest.h>

#include "breuer/random.hpp"
#include "breuer/semifinite.hpp"
#include "helpers.hpp"

using namespace breuer;
using testutil::diag;

TEST_CASE("weighted trace") {
  TraceContext ctx({{3, 1.0 / 3}});
  CHECK(trace(ctx, diag({1, 2, 3})).real() == doctest::Approx(2.0).epsilon(1e-15));
  TraceContext two({{2, 1.0}, {1, 0.5}});
  CHECK(two.tau_one() == doctest::Approx(2.5));
  CHECK(trace(two, diag({1, 1, 4})).real() == doctest::Approx(4.0));
}

TEST_CASE("p-norms") {
  TraceContext ctx({{2, 1.0}});
  CHECK(p_norm(ctx, diag({3, 4}), 2.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(p_norm(ctx, diag({3, -4}), 1.0) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK_THROWS_AS(p_norm(ctx, diag({1, 1}), 0.0), ParameterError);
}

TEST_CASE("context errors") {
  CHECK_THROWS_AS(TraceContext(std::vector<Block>{}), ContextError);
  CHECK_THROWS_AS(TraceContext({{2, -1.0}}), ContextError);
  TraceContext ctx({{1, 1.0}, {1, 1.0}});
  Matrix off = testutil::unit(2, 0, 1);
  CHECK_THROWS_AS(require_affiliated(ctx, off, "T"), ContextError);
  CHECK_THROWS_AS(trace(ctx, diag({1, 2, 3})), ContextError);
}

TEST_CASE("singular profile integrates to the trace norm") {
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    TraceContext ctx = random_context(rng, 3, 4);
    Matrix T = random_affiliated(ctx, rng);
    CHECK(singular_profile(ctx, T).integral() == doctest::Approx(p_norm(ctx, T, 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("Hoelder and triangle inequalities") {
  Rng rng(5);
  TraceContext ctx = random_context(rng, 3, 4);
  Matrix T = random_affiliated(ctx, rng), S = random_affiliated(ctx, rng);
  CHECK(holder_check(ctx, T, S, 2, 2, 1).pass);
  CHECK(holder_check(ctx, T, S, 3, 6, 2).pass);
  CHECK(triangle_check(ctx, T, S, 1.5).pass);
}

TEST_CASE("inflation keeps the trace of a (x) 1_N") {
  TraceContext ctx({{2, 0.5}, {1, 2.0}});
  Matrix a = diag({1, 2, 3});
  Matrix aN = inflate(ctx, a, 3);
  CHECK(aN.rows() == 9);
  CHECK(trace(ctx.inflate(3), aN).real() == doctest::Approx(3 * trace(ctx, a).real()));
}

TEST_CASE("heat trace and parity") {
  TraceContext ctx({{2, 1.0}});
  CHECK(heat_trace(ctx, Matrix::Zero(2, 2), 1.0) == doctest::Approx(2.0));
  Grading g = testutil::grading({1, -1});
  CHECK(parity_of(testutil::flip(), g) == Parity::odd);
  CHECK(parity_of(diag({1, 2}), g) == Parity::even);
  CHECK(parity_of(diag({1, 2}) + testutil::unit(2, 0, 1), g) == Parity::unassigned);
}
