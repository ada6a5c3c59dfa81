#pragma once

// Test-side oracles, independent of the library's derivative paths.

#include <cmath>
#include <functional>

#include "plab/linalg.hpp"
#include "plab/rng.hpp"

namespace testsup {

using plab::Mat;
using plab::Vec;

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                       double h = 1e-6) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    double hi = h * (1.0 + std::fabs(x[i]));
    xp[i] += hi;
    xm[i] -= hi;
    g[i] = (f(xp) - f(xm)) / (2.0 * hi);
  }
  return g;
}

inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    double hi = h * (1.0 + std::fabs(x[i]));
    xp[i] += hi;
    xm[i] -= hi;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * hi);
  }
  return j;
}

inline Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x,
                      double h = 2e-4) {
  const int n = static_cast<int>(x.size());
  Mat m(n, n);
  double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    double hi = h * (1.0 + std::fabs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += hi;
    xm[i] -= hi;
    m(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (hi * hi);
    for (int j = 0; j < i; ++j) {
      double hj = h * (1.0 + std::fabs(x[j]));
      Vec a = x, b = x, c = x, d = x;
      a[i] += hi; a[j] += hj;
      b[i] += hi; b[j] -= hj;
      c[i] -= hi; c[j] += hj;
      d[i] -= hi; d[j] -= hj;
      double v = (f(a) - f(b) - f(c) + f(d)) / (4.0 * hi * hj);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

inline Vec random_vec(plab::CounterRng& rng, int n, double lo, double hi) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

// random strictly interior corner-simplex point with margin from the boundary
inline Vec random_corner_point(plab::CounterRng& rng, int n) {
  Vec e(n + 1);
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    e[i] = rng.exponential() + 0.05;
    s += e[i];
  }
  Vec y(n);
  for (int i = 0; i < n; ++i) y[i] = e[i + 1] / s;
  return y;
}

}  // namespace testsup
