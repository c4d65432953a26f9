#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "breuer/characters.hpp"

namespace breuer {

struct CheckReport {
  std::string name;
  double residual = 0;  // max over samples
  double scale = 1;
  double tolerance = 0;
  double slope = 0;     // Richardson slope, finite-difference checks only
  bool has_slope = false;
  bool pass = false;
  std::map<std::string, double> values;
};

// residual <= tol * scale (+ tiny absolute floor)
bool within(double residual, double scale, double tol);

// central differences of f at 0 for each h, compared with rhs
struct FiniteDifference {
  std::vector<double> h;
  std::vector<double> error;
  double slope = 0;
  bool slope_defined = false;
};
FiniteDifference central_difference(const std::function<Complex(double)>& f, Complex rhs, std::vector<double> hs);

enum class LemmaVariant { cyclic, insert_ones, bracket_D, bracket_D2 };
LemmaVariant lemma_variant_from(const std::string& s);

CheckReport lemma_misc_check(const TraceContext& ctx, const Matrix& D, const std::optional<Grading>& grading,
                             const std::vector<Matrix>& factors, LemmaVariant v, int j = 1);

std::vector<Chain> random_chains(const TraceContext& ctx, int level, int count, std::uint64_t seed,
                                 const std::optional<Grading>& even_in = std::nullopt, int terms = 2);

CheckReport complex_identities_check(int chains, int cochains, std::uint64_t seed);
CheckReport bracket_agreement_check(int instances, std::uint64_t seed, long mc_samples = 100000);

CheckReport jlo_cocycle_check(const UnboundedModule& m, int n, const std::vector<Chain>& chains,
                              const BracketOptions& opt = {});
CheckReport connes_cocycle_check(const BoundedModule& m, int n, const std::vector<Chain>& level_n,
                                 const std::vector<Chain>& level_n2);
CheckReport jlo_v_identity_check(const UnboundedModule& m, const Matrix& V, const std::vector<Chain>& chains,
                           const BracketOptions& opt = {});
CheckReport jlo_vw_identity_check(const UnboundedModule& m, const Matrix& V, const Matrix& W,
                            const std::vector<Chain>& chains, const BracketOptions& opt = {});

CheckReport duhamel_check(const TraceContext& ctx, const Matrix& D, const Matrix& V,
                          const std::optional<Grading>& grading, const std::vector<Matrix>& factors,
                          std::vector<double> hs = {1e-2, 1e-3});
// d/dt Ch^n(D+tV)(c) against Ch^{n-1}(D,V)(bc) + Ch^{n+1}(D,V)(Bc)
CheckReport cobound_check(const UnboundedModule& m, const Matrix& V, const Chain& c,
                          std::vector<double> hs = {1e-2, 1e-3}, const BracketOptions& opt = {});
// F_t = e^{itH} F e^{-itH}
CheckReport connes_transgression_check(const BoundedModule& m, const Matrix& H, int n, const Chain& c,
                                       std::vector<double> hs = {1e-2, 1e-3});
CheckReport reduction_check(const UnboundedModule& m, int n, const std::vector<Chain>& chains,
                            const QuadratureSpec& q = {}, const BracketOptions& opt = {});
CheckReport d_alpha_transgression_check(const UnboundedModule& m, int n, double alpha, double t, const Chain& c,
                                        std::vector<double> hs = {1e-2, 5e-3}, const QuadratureSpec& q = {},
                                        const BracketOptions& opt = {});
CheckReport getzler_check(int instances, std::uint64_t seed, double delta = 0.05, double eps = 0.1);

}  // namespace breuer
