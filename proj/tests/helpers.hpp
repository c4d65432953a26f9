#pragma once

#include <initializer_list>

#include "breuer/types.hpp"
#include "breuer/semifinite.hpp"

namespace testutil {

inline breuer::Matrix diag(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double t : v) x(i++) = t;
  return breuer::Matrix(x.cast<breuer::Complex>().asDiagonal());
}

inline breuer::Grading grading(std::initializer_list<double> v) {
  breuer::Grading g(v.size());
  int i = 0;
  for (double t : v) g(i++) = t;
  return g;
}

inline breuer::Matrix unit(int d, int i, int j) {
  breuer::Matrix m = breuer::Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline breuer::Matrix flip() {
  breuer::Matrix F(2, 2);
  F << 0, 1, 1, 0;
  return F;
}

}  // namespace testutil
