#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "plab/linalg.hpp"

namespace plab {

enum class DerivativeMode { closed_form, finite_difference };

// Per-order central-difference base steps; the effective step in coordinate i
// is step * (1 + |x_i|).
struct FdSteps {
  double gradient = 1e-7;
  double hessian = 2e-4;
  double third = 1e-3;
};

struct DerivativeBundle {
  double value = 0.0;
  std::optional<Vec> gradient;
  std::optional<Mat> hessian;
  std::optional<Tensor3> third;
};

// A smooth convex potential on R^n with derivatives up to order three.
// The two built-ins carry closed forms; custom potentials supply a value
// callable and get central differences for everything else.
class Potential {
 public:
  enum class Kind { simplex, exponential, custom };

  // psi(x) = log(1 + e^{x_1} + ... + e^{x_n}), the symplectic potential of
  // the simplex; evaluated through a shifted log-sum-exp.
  static Potential simplex(int n);

  // psi(x) = sum_i e^{x_i}, moment map onto the open positive orthant.
  static Potential exponential(int n);

  static Potential custom(int n, std::function<double(const Vec&)> value,
                          FdSteps steps = FdSteps{});

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  DerivativeMode mode() const { return mode_; }
  const FdSteps& fd_steps() const { return steps_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  // Symmetrized order-3 tensor (canonical stencils are symmetric already in
  // finite-difference mode; closed forms are symmetric analytically).
  Tensor3 third(const Vec& x) const;

  DerivativeBundle bundle(const Vec& x, int order) const;

 private:
  Potential(int n, Kind kind, DerivativeMode mode) : n_(n), kind_(kind), mode_(mode) {}

  void check_point(const Vec& x) const;
  double raw_value(const Vec& x) const;

  Vec fd_gradient(const Vec& x) const;
  Mat fd_hessian(const Vec& x) const;
  Tensor3 fd_third(const Vec& x) const;

  int n_;
  Kind kind_;
  DerivativeMode mode_;
  FdSteps steps_{};
  std::function<double(const Vec&)> custom_value_;
};

// Averages a raw tensor over the six index permutations. Returns the
// symmetric part and the maximum deviation of the input from it.
std::pair<Tensor3, double> symmetrize_third(const Tensor3& raw);

}  // namespace plab
