#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace breuer {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContextError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct StructuralError : Error { using Error::Error; };
struct LevelError : Error { using Error::Error; };
struct CapError : Error { using Error::Error; };
struct InvertibilityError : Error { using Error::Error; };
struct RefinementError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// Neumaier summation, used wherever results must not depend on grouping.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    comp_ += correction(sum_, x, t);
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double corr1(double s, double x, double t) {
    return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  }
  static double correction(double s, double x, double t) { return corr1(s, x, t); }
  static Complex correction(Complex s, Complex x, Complex t) {
    return {corr1(s.real(), x.real(), t.real()), corr1(s.imag(), x.imag(), t.imag())};
  }
  T sum_{};
  T comp_{};
};

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace breuer
