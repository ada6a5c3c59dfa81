#pragma once

#include <utility>
#include <vector>

#include "plab/linalg.hpp"

namespace plab {

// Gauss-Legendre nodes and weights on [-1, 1], Newton on the recurrence.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Nodes/weights on (0, inf) through t = u/(1-u); weights carry the Jacobian
// but not the density.
struct HalfLineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

HalfLineRule half_line_rule(int n);

}  // namespace plab
