#pragma once

#include <vector>

namespace plab {

struct KsResult {
  double statistic = 0.0;
  double critical_value = 0.0;  // at the requested alpha
  bool reject = false;
};

// Two-sample Kolmogorov-Smirnov test. Supported alpha: 0.05, 0.01, 0.001.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
};

MeanSe mean_with_se(const std::vector<double>& xs);

}  // namespace plab
