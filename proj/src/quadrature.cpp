#include "plab/quadrature.hpp"

#include <cmath>

#include "plab/errors.hpp"

namespace plab {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  std::vector<double> x(n), w(n);
  for (int k = 0; k < n; ++k) {
    double t = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double a = 1.0, b = t;
      for (int j = 2; j <= n; ++j) {
        double c = ((2 * j - 1) * t * b - (j - 1) * a) / j;
        a = b;
        b = c;
      }
      p1 = b;
      dp = n * (t * b - a) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-15) {
        // one refresh of p1/dp at the converged node
        a = 1.0; b = t;
        for (int j = 2; j <= n; ++j) {
          double c = ((2 * j - 1) * t * b - (j - 1) * a) / j;
          a = b;
          b = c;
        }
        p1 = b;
        dp = n * (t * b - a) / (t * t - 1.0);
        break;
      }
    }
    x[k] = t;
    w[k] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

HalfLineRule half_line_rule(int n) {
  auto [x, w] = gauss_legendre(n);
  HalfLineRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double u = 0.5 * (x[k] + 1.0);
    double du = 0.5 * w[k];
    rule.nodes[k] = u / (1.0 - u);
    rule.weights[k] = du / ((1.0 - u) * (1.0 - u));
  }
  return rule;
}

}  // namespace plab
