#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "breuer/types.hpp"

namespace breuer {

struct Block {
  int dim = 1;
  double weight = 1.0;
};

// Finite direct sum of matrix factors, tau = sum_b weight_b Tr_b.
class TraceContext {
 public:
  TraceContext() = default;
  explicit TraceContext(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int total_dim() const { return total_; }
  int offset(int b) const { return offsets_[b]; }
  int dim(int b) const { return blocks_[b].dim; }
  double weight(int b) const { return blocks_[b].weight; }
  double tau_one() const;
  // weight of each basis vector
  RealVector basis_weights() const;

  // M_N inflation: block (d, w) becomes (N d, w)
  TraceContext inflate(int N) const;

  bool operator==(const TraceContext& o) const;
  bool operator!=(const TraceContext& o) const { return !(*this == o); }

 private:
  std::vector<Block> blocks_;
  std::vector<int> offsets_;
  int total_ = 0;
};

using Grading = RealVector;  // diagonal of chi, entries +-1

enum class Parity { even, odd, unassigned };

Matrix block_of(const TraceContext& ctx, const Matrix& T, int b);
Matrix assemble(const TraceContext& ctx, const std::vector<Matrix>& blocks);

double affiliation_defect(const TraceContext& ctx, const Matrix& T);
void require_affiliated(const TraceContext& ctx, const Matrix& T, const char* what);
bool is_self_adjoint(const Matrix& T, double rel = 1e-10);
void require_self_adjoint(const Matrix& T, const char* what);
void require_grading(const TraceContext& ctx, const Grading& g);
Parity parity_of(const Matrix& T, const Grading& g, double tol = 1e-10);

// a (x) 1_N in the inflated basis
Matrix inflate(const TraceContext& ctx, const Matrix& a, int N);
Grading inflate(const TraceContext& ctx, const Grading& g, int N);

Complex trace(const TraceContext& ctx, const Matrix& T);
double p_norm(const TraceContext& ctx, const Matrix& T, double p);

struct SingularProfile {
  std::vector<std::pair<double, double>> steps;  // (value, weight), descending
  double value_at(double x) const;
  double integral() const;                        // int_0^inf mu_x dx
  double integral(std::function<double(double)> f) const;
  double total_weight() const;
};

SingularProfile singular_profile(const TraceContext& ctx, const Matrix& T);

struct BoundReport {
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};

BoundReport holder_check(const TraceContext& ctx, const Matrix& T, const Matrix& S, double p,
                         double q, double r);
BoundReport triangle_check(const TraceContext& ctx, const Matrix& T, const Matrix& S, double p);
BoundReport str_check(const TraceContext& ctx, const Matrix& S, const Matrix& T, const Matrix& R,
                      double p);

struct BlockSpectrum {
  std::vector<RealVector> values;
  std::vector<Matrix> vectors;
};

BlockSpectrum block_eigh(const TraceContext& ctx, const Matrix& H);
Matrix spectral_apply(const TraceContext& ctx, const Matrix& H, const std::function<double(double)>& f);

double heat_trace(const TraceContext& ctx, const Matrix& D, double t);
double ptheta_bound(const TraceContext& ctx, const Matrix& D, double p, double t);

struct SummabilityReport {
  double p_value = 0;
  std::vector<double> t;
  std::vector<double> heat;
  std::vector<double> bound;
  bool ptheta_bound_pass = true;
};

SummabilityReport summability_report(const TraceContext& ctx, const Matrix& D, double p,
                                     std::vector<double> ts = {});

}  // namespace breuer
