#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "breuer/types.hpp"

namespace breuer {

struct QuadratureSpec {
  int panels = 16;
  int order = 10;
  double cutoff = 0;  // 0 means auto
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(Complex x) { return std::abs(x); }

// Gauss-Kronrod 7/15 on [-1,1]
inline const double gk_x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                               0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline const double gk_wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline const double gk_wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T k = fc * gk_wk[7];
  T g = fc * gk_wg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * gk_x[j];
    T s = f(c - dx) + f(c + dx);
    k += s * gk_wk[j];
    if (j % 2 == 1) g += s * gk_wg[j / 2];
  }
  return {a, b, k * h, magnitude((k - g) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod on a finite interval.
template <class T>
T integrate_adaptive(const std::function<T(double)>& f, double a, double b, double abs_tol,
                     double rel_tol, int max_segments = 2000, double* err_out = nullptr) {
  auto fn = f;
  std::priority_queue<detail::Segment<T>> q;
  auto first = detail::gk15<T>(fn, a, b);
  q.push(first);
  T total = first.value;
  double err = first.error;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * detail::magnitude(total)) && count < max_segments) {
    auto s = q.top();
    q.pop();
    double m = 0.5 * (s.a + s.b);
    auto l = detail::gk15<T>(fn, s.a, m);
    auto r = detail::gk15<T>(fn, m, s.b);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    q.push(l);
    q.push(r);
    count += 1;
  }
  // resum for stability
  CompensatedSum<T> acc;
  double e = 0;
  std::vector<detail::Segment<T>> segs;
  while (!q.empty()) {
    segs.push_back(q.top());
    q.pop();
  }
  std::sort(segs.begin(), segs.end(), [](auto& x, auto& y) { return x.a < y.a; });
  for (auto& s : segs) {
    acc.add(s.value);
    e += s.error;
  }
  if (err_out) *err_out = e;
  return acc.value();
}

// [a, inf) via x = a + s/(1-s)
template <class T>
T integrate_to_infinity(const std::function<T(double)>& f, double a, double abs_tol, double rel_tol,
                        int max_segments = 2000, double* err_out = nullptr) {
  std::function<T(double)> g = [&](double s) -> T {
    if (s >= 1.0) return T{};
    double x = a + s / (1 - s);
    return f(x) * (1.0 / ((1 - s) * (1 - s)));
  };
  return integrate_adaptive<T>(g, 0.0, 1.0, abs_tol, rel_tol, max_segments, err_out);
}

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes on [-1,1] by Newton iteration
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return r;
}

template <class T>
T integrate_panels(const std::function<T(double)>& f, double a, double b, int panels, int order) {
  GaussRule g = gauss_legendre(order);
  CompensatedSum<T> acc;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (int i = 0; i < order; ++i) acc.add(f(lo + 0.5 * h * (g.x[i] + 1)) * (0.5 * h * g.w[i]));
  }
  return acc.value();
}

}  // namespace breuer
