#pragma once

#include <functional>

#include "plab/linalg.hpp"

namespace plab {

// Weighted 1-D Neumann problem on [a,b]: density and right-hand side are
// callables so the grid can be refined; the rhs must integrate to zero
// against the density (trapezoid rule, relative 1e-12).
struct IntervalProblem {
  double a = -1.0;
  double b = 1.0;
  int grid_points = 4097;
  std::function<double(double)> density;
  std::function<double(double)> rhs;
};

// || f ||_{H^-1(nu)} through the dual identity: solve (rho u')' = -f rho
// with zero-flux endpoints, return sqrt(int f u dnu). The flux recursion is
// exact in 1-D; the value is Richardson-checked at G and 2G-1 points
// (relative 1e-5) and the fine-grid value is returned.
double hminus_norm_1d(const IntervalProblem& problem);

struct PairingResult {
  double lhs = 0.0;
  double rhs_bound = 0.0;
  int order = 0;
};

// Eigenfunction pairing check on the unit sphere S^{k-1}, k in {2,3}:
//   int <y,theta> h dsigma  vs  sqrt(1/(k(k-1))) sqrt(int |grad h|^2 dsigma).
// Trapezoid on the circle, Gauss-Legendre x trapezoid on S^2; tangential
// gradients by central differences in chart coordinates. Doubling the order
// must move both sides by less than 1e-6.
PairingResult sphere_pairing_check(int k, const Vec& theta,
                                   const std::function<double(const Vec&)>& h, int order = 256);

// Radius-R version; the constant picks up a factor R^2.
PairingResult scaled_pairing_check(int k, double R, const Vec& theta,
                                   const std::function<double(const Vec&)>& h, int order = 256);

}  // namespace plab
