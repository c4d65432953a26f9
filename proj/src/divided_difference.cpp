#include "breuer/divided_difference.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace breuer {

double exp_divided_difference(std::vector<double> nodes) {
  const int m = static_cast<int>(nodes.size());
  if (m == 0) return 0.0;
  std::sort(nodes.begin(), nodes.end());
  const double shift = nodes.front();
  if (m == 1) return std::exp(-shift);
  if (m == 2) {
    double h = nodes[1] - nodes[0];
    // (1 - e^{-h})/h, stable near h = 0
    double v = h < 1e-8 ? 1 - h / 2 + h * h / 6 : -std::expm1(-h) / h;
    return std::exp(-shift) * v;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    A(i, i) = -(nodes[i] - shift);
    if (i + 1 < m) A(i, i + 1) = 1.0;
  }
  Eigen::MatrixXd E = A.exp();
  return std::exp(-shift) * E(0, m - 1);
}

}  // namespace breuer
