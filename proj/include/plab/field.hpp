#pragma once

#include <functional>
#include <string>
#include <utility>

#include "plab/linalg.hpp"

namespace plab {

// A scalar function with optional closed-form derivatives; central
// differences fill the gaps. Used for the weight functions paired with a
// potential and for measure densities.
class ScalarField {
 public:
  ScalarField() = default;

  explicit ScalarField(std::function<double(const Vec&)> value, std::string name = "custom")
      : value_(std::move(value)), name_(std::move(name)) {}

  ScalarField(std::function<double(const Vec&)> value,
              std::function<Vec(const Vec&)> gradient,
              std::function<Mat(const Vec&)> hessian, std::string name = "custom")
      : value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)),
        name_(std::move(name)) {}

  static ScalarField constant(double c) {
    return ScalarField([c](const Vec&) { return c; },
                       [](const Vec& x) { return Vec(Vec::Zero(x.size())); },
                       [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); },
                       "const");
  }

  bool valid() const { return static_cast<bool>(value_); }
  const std::string& name() const { return name_; }

  double value(const Vec& x) const { return value_(x); }

  Vec gradient(const Vec& x) const {
    if (gradient_) return gradient_(x);
    int n = static_cast<int>(x.size());
    Vec g(n);
    for (int i = 0; i < n; ++i) {
      double h = 1e-7 * (1.0 + std::fabs(x[i]));
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (value_(xp) - value_(xm)) / (2.0 * h);
    }
    return g;
  }

  Mat hessian(const Vec& x) const {
    if (hessian_) return hessian_(x);
    int n = static_cast<int>(x.size());
    Mat m(n, n);
    double f0 = value_(x);
    for (int i = 0; i < n; ++i) {
      double hi = 2e-4 * (1.0 + std::fabs(x[i]));
      Vec xp = x, xm = x;
      xp[i] += hi;
      xm[i] -= hi;
      m(i, i) = (value_(xp) - 2.0 * f0 + value_(xm)) / (hi * hi);
      for (int j = 0; j < i; ++j) {
        double hj = 2e-4 * (1.0 + std::fabs(x[j]));
        Vec a = x, b = x, c = x, d = x;
        a[i] += hi; a[j] += hj;
        b[i] += hi; b[j] -= hj;
        c[i] -= hi; c[j] += hj;
        d[i] -= hi; d[j] -= hj;
        double v = (value_(a) - value_(b) - value_(c) + value_(d)) / (4.0 * hi * hj);
        m(i, j) = v;
        m(j, i) = v;
      }
    }
    return m;
  }

 private:
  std::function<double(const Vec&)> value_;
  std::function<Vec(const Vec&)> gradient_;
  std::function<Mat(const Vec&)> hessian_;
  std::string name_ = "unset";
};

}  // namespace plab
