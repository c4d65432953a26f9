#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "breuer/semifinite.hpp"

namespace breuer {

enum class BracketMethod { divided_difference, nested_quadrature, monte_carlo };

struct BracketOptions {
  BracketMethod method = BracketMethod::divided_difference;
  std::uint64_t seed = 1;
  long samples = 100000;
  double rel_tol = 1e-11;
  int level_cap = 6;
  int dim_cap = 64;
};

// Heat bracket <F_0,...,F_n>_{tD} with (tD)^2 diagonalized once per block.
class HeatKernel {
 public:
  HeatKernel(const TraceContext& ctx, const Matrix& D, std::optional<Grading> grading = std::nullopt,
             double t = 1.0, BracketOptions options = {});

  Complex operator()(const std::vector<Matrix>& factors) const;
  Complex bracket(const std::vector<Matrix>& factors, const BracketOptions& options) const;

  const TraceContext& ctx() const { return ctx_; }
  const Matrix& D() const { return D_; }
  const std::optional<Grading>& grading() const { return grading_; }
  double scale() const { return t_; }
  const BracketOptions& options() const { return options_; }

 private:
  struct Cache;
  Complex divided_difference(const std::vector<Matrix>& f) const;
  Complex nested(const std::vector<Matrix>& f, double rel_tol) const;
  Complex monte_carlo(const std::vector<Matrix>& f, std::uint64_t seed, long samples) const;
  std::vector<std::vector<Matrix>> rotate(const std::vector<Matrix>& f) const;

  TraceContext ctx_;
  Matrix D_;
  std::optional<Grading> grading_;
  double t_;
  BracketOptions options_;
  std::vector<RealVector> lambda_;  // eigenvalues of (tD)^2 per block
  std::vector<Matrix> U_;
  std::shared_ptr<Cache> cache_;
};

struct HeatBracketRequest {
  TraceContext ctx;
  Matrix D;
  std::optional<Grading> grading;
  std::vector<Matrix> factors;
  double t = 1.0;
  BracketOptions options;
};

Complex heat_bracket(const HeatBracketRequest& req);

}  // namespace breuer
