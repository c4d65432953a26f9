#include <doctest.h>

#include <cmath>

#include "breuer/chain.hpp"
#include "breuer/characters.hpp"
#include "breuer/checks.hpp"
#include "breuer/random.hpp"
#include "helpers.hpp"

using namespace breuer;
using testutil::diag;

namespace {

double max_pairing(const Chain& c, std::uint64_t seed) {
  double worst = 0;
  for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(pair(test_cochain(c.ctx, c.level + 2, seed + k), c)));
  return worst;
}

}  // namespace

TEST_CASE("b and B square to zero") {
  TraceContext ctx({{2, 0.7}, {2, 1.3}});
  for (int level = 0; level <= 4; ++level) {
    Chain c = random_chains(ctx, level, 1, 40 + level, std::nullopt, 3)[0];
    CHECK(max_pairing(boundary_b(boundary_b(c)), 7) < 1e-10);
    CHECK(max_pairing(boundary_B(boundary_B(c)), 7) < 1e-10);
    if (level > 0) CHECK(max_pairing(canonicalize(boundary_b(boundary_B(c)) + boundary_B(boundary_b(c))), 7) < 1e-10);
  }
}

TEST_CASE("b on level 0 is the zero chain") {
  TraceContext ctx({{2, 1.0}});
  Chain c = Chain::elementary(ctx, {diag({1, 2})});
  CHECK(boundary_b(c).terms.empty());
}

TEST_CASE("canonicalization drops scalar slots and merges terms") {
  TraceContext ctx({{2, 1.0}});
  Matrix a = diag({1, 2}), I = Matrix::Identity(2, 2);
  Chain c = Chain::elementary(ctx, {a, I}) + Chain::elementary(ctx, {a, a}, 2.0) + Chain::elementary(ctx, {a, a}, 3.0);
  Chain k = canonicalize(c);
  REQUIRE(k.terms.size() == 1);
  CHECK(std::abs(k.terms[0].coeff - Complex(5.0)) < 1e-15);
}

TEST_CASE("level mismatch is a structural error") {
  TraceContext ctx({{2, 1.0}});
  Matrix a = diag({1, 2});
  CHECK_THROWS_AS(Chain::elementary(ctx, {a}) + Chain::elementary(ctx, {a, a}), StructuralError);
}

TEST_CASE("even Chern character coefficients") {
  TraceContext ctx({{2, 1.0}});
  Matrix p = diag({1, 0});
  auto ch = chern_plus(ctx, p, 2);
  REQUIRE(ch.size() == 3);
  CHECK(ch[0].level == 0);
  CHECK(ch[1].level == 2);
  CHECK(ch[2].level == 4);
  REQUIRE(ch[1].terms.size() == 1);
  CHECK(ch[1].terms[0].coeff.real() == doctest::Approx(-1.0));
  REQUIRE(ch[2].terms.size() == 1);
  CHECK(ch[2].terms[0].coeff.real() == doctest::Approx(6.0));
}

TEST_CASE("scalar projection has no higher Chern terms") {
  TraceContext ctx({{2, 1.0}});
  auto ch = chern_plus(ctx, Matrix::Identity(2, 2), 2);
  CHECK(ch[1].terms.empty());
  CHECK(ch[2].terms.empty());
}

TEST_CASE("odd Chern character") {
  TraceContext ctx({{2, 1.0}});
  Matrix u = diag({1, 1}) * Complex(0, 1);
  u(1, 1) = 1.0;
  auto ch = chern_minus(ctx, u, 1);
  REQUIRE(ch[0].terms.size() == 1);
  CHECK(ch[0].terms[0].coeff.real() == doctest::Approx(-1.0 / std::sqrt(M_PI)));
  CHECK(ch[1].terms[0].coeff.real() == doctest::Approx(1.0 / std::sqrt(M_PI)));
  CHECK(canonicalize(boundary_b(ch[0])).terms.empty());
  auto trivial = chern_minus(ctx, Matrix::Identity(2, 2), 1);
  CHECK(trivial[0].terms.empty());
  CHECK_THROWS(chern_minus(ctx, 2.0 * Matrix::Identity(2, 2), 0));
}

TEST_CASE("Chern chains are (b+B)-closed") {
  Rng rng(9);
  TraceContext ctx({{3, 0.6}, {2, 1.1}});
  Matrix p = random_projection(ctx, rng);
  auto ch = chern_plus(ctx, p, 2);
  for (int k = 0; k < 2; ++k) {
    Chain s = canonicalize(boundary_b(ch[k + 1]) + boundary_B(ch[k]));
    CHECK(max_pairing(s, 11) < 1e-10);
  }
}

TEST_CASE("bicomplex identities over the standard ensemble") {
  CheckReport r = complex_identities_check(100, 10, 1);
  CHECK(r.pass);
  CHECK(r.residual <= 1e-10);
}
