#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "breuer/semifinite.hpp"

namespace breuer {

struct Term {
  Complex coeff{1.0, 0.0};
  std::vector<Matrix> entries;  // a_0, ..., a_n
};

struct Chain {
  TraceContext ctx;
  int level = 0;
  std::vector<Term> terms;

  static Chain zero(const TraceContext& ctx, int level) { return Chain{ctx, level, {}}; }
  static Chain elementary(const TraceContext& ctx, std::vector<Matrix> entries, Complex coeff = 1.0);
};

void check_structure(const Chain& c);

Chain boundary_b(const Chain& c);
Chain boundary_B(const Chain& c);
Chain canonicalize(const Chain& c);
Chain operator+(const Chain& x, const Chain& y);
Chain operator*(Complex s, const Chain& c);
bool is_scalar(const TraceContext& ctx, const Matrix& a);

struct Cochain {
  std::function<bool(int)> supports = [](int) { return true; };
  std::function<Complex(const std::vector<Matrix>&)> eval;
};

Cochain zero_cochain();
Complex pair(const Cochain& phi, const Chain& c);

// phi o b and phi o B, as cochains one level up / down
Cochain compose_b(const Cochain& phi, const TraceContext& ctx);
Cochain compose_B(const Cochain& phi, const TraceContext& ctx);

// c -> sum_n coeff_n prod_j tau(R_{n,j} a_j), R_{n,j} traceless for j >= 1
Cochain test_cochain(const TraceContext& ctx, int max_level, std::uint64_t seed);

double chain_size(const Chain& c);  // sum |coeff| prod ||a_j||

struct GrowthReport {
  std::vector<double> per_level;
  double sup = 0;
};

GrowthReport growth_report(const std::vector<Chain>& family, double lambda);

}  // namespace breuer
