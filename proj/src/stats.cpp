#include "plab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "plab/errors.hpp"
#include "plab/linalg.hpp"

namespace plab {

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  double c;
  if (alpha == 0.05) c = 1.358;
  else if (alpha == 0.01) c = 1.628;
  else if (alpha == 0.001) c = 1.949;
  else throw DomainError("ks_two_sample: unsupported alpha");
  KsResult r;
  r.statistic = d;
  r.critical_value = c * std::sqrt((na + nb) / (na * nb));
  r.reject = d > r.critical_value;
  return r;
}

MeanSe mean_with_se(const std::vector<double>& xs) {
  MeanSe m;
  m.n = static_cast<long>(xs.size());
  if (m.n == 0) return m;
  KahanSum s;
  for (double x : xs) s.add(x);
  m.mean = s.value() / m.n;
  if (m.n < 2) return m;
  KahanSum s2;
  for (double x : xs) s2.add((x - m.mean) * (x - m.mean));
  m.se = std::sqrt(s2.value() / (m.n - 1) / m.n);
  return m;
}

}  // namespace plab
