#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "plab/field.hpp"
#include "plab/linalg.hpp"

namespace plab {

using MultiIndex = std::vector<int>;

// One separable factor of an orthant product measure: density exp(-phi(t))
// on (0, inf), known pointwise through the exponent.
struct OrthantFactor {
  std::function<double(double)> exponent;
  std::string name = "custom";
};

struct SecondMoments {
  Vec values;
  Vec std_errors;  // zero on the exact path
  bool exact = false;
};

struct ProbeReport {
  int trials = 0;
  int violations = 0;
  double worst = 0.0;  // most positive violation observed
  bool pass = false;
};

struct HomogeneityReport {
  bool homogeneous = false;
  double worst_rel = 0.0;
  double sup_on_simplex = 0.0;  // M
  double gate_value = 0.0;      // M*q
  bool gate_pass = false;       // M*q <= n
};

struct QuadratureGrid {
  Mat nodes;       // one row per node
  Vec weights;     // density included
  double total_mass = 0.0;
};

struct RejectionStats {
  long proposals = 0;
  long accepted = 0;
  double acceptance_rate() const {
    return proposals > 0 ? static_cast<double>(accepted) / proposals : 0.0;
  }
};

// Tagged union over the measure families the inequalities quantify over.
// Immutable; all sampling is a pure function of (measure, seed, count).
class Measure {
 public:
  // uniform probability on the regular simplex in R^{n+1}
  static Measure regular_simplex(int n);
  // uniform probability on the convex hull of 0, e_1, ..., e_n in R^n
  static Measure corner_simplex(int n);
  // uniform probability on the l_p ball, 0 < p < 1
  static Measure lp_ball(int n, double p);
  static Measure orthant_product(std::vector<OrthantFactor> factors);
  // density proportional to exp(-phi) against the uniform simplex measure;
  // q records the declared homogeneity degree of phi
  static Measure weighted_simplex(int n, ScalarField phi, double q);
  static Measure interval(double a, double b);

  int ambient_dimension() const;
  std::string descriptor() const;

  bool is_regular_simplex() const;
  bool is_corner_simplex() const;
  bool is_lp_ball() const;
  bool is_orthant_product() const;
  bool is_weighted_simplex() const;
  bool is_interval() const;

  int simplex_n() const;  // the n of either simplex family
  double lp_p() const;
  const std::vector<OrthantFactor>& factors() const;
  const ScalarField& weight() const;
  double weight_degree() const;
  std::pair<double, double> interval_bounds() const;

  // deterministic: same (seed, count) gives the same rows
  Mat sample(std::uint64_t seed, long count) const;

  bool has_exact_moments() const;
  double exact_polynomial_moment(const MultiIndex& a) const;

  SecondMoments second_moments(std::uint64_t seed = 1, long mc_samples = 100000) const;

  // 1-D factor helpers for the orthant family
  double factor_mass(int i) const;
  double factor_moment(int i, int power) const;  // normalized

 private:
  struct RegularSimplexSpec { int n; };
  struct CornerSimplexSpec { int n; };
  struct LpBallSpec { int n; double p; };
  struct OrthantProductSpec;
  struct WeightedSimplexSpec { int n; ScalarField phi; double q; };
  struct IntervalSpec { double a, b; };

  using Spec = std::variant<RegularSimplexSpec, CornerSimplexSpec, LpBallSpec,
                            std::shared_ptr<OrthantProductSpec>, WeightedSimplexSpec,
                            IntervalSpec>;

  explicit Measure(Spec s) : spec_(std::move(s)) {}
  Spec spec_;
};

// Independent oracle for the l_p ball: uniform proposals on [-1,1]^n
// accepted iff sum |x_i|^p <= 1. Feasible for n <= 4.
Mat rejection_sample_lp(int n, double p, std::uint64_t seed, long count,
                        RejectionStats* stats = nullptr);

// exact volume (2 Gamma(1/p+1))^n / Gamma(n/p+1)
double lp_ball_volume(int n, double p);

// Midpoint-convexity probe of x -> phi(x_1^{e_1}, ..., x_n^{e_n}) on random
// segments in the positive orthant.
ProbeReport power_convexity_probe(const std::function<double(const Vec&)>& phi, int n,
                                  const std::vector<double>& exponents, std::uint64_t seed,
                                  int trials);

// p-convexity of a function on R_+^n: exponents all equal to 1/p.
ProbeReport p_convexity_probe(const std::function<double(const Vec&)>& phi, int n, double p,
                              std::uint64_t seed, int trials);

// p-convexity of a set through its membership oracle: for sampled u, v in K
// the p-power midpoint must map back into K.
ProbeReport set_p_convexity_probe(const std::function<bool(const Vec&)>& contains,
                                  const Vec& box_lo, const Vec& box_hi, double p,
                                  std::uint64_t seed, int trials);

// phi on R_+^{n+1}; checks phi(lambda x) = lambda^q phi(x) and the gate
// M q <= n with M = sup over simplex samples.
HomogeneityReport homogeneity_check(const ScalarField& phi, int n, double q,
                                    std::uint64_t seed, int trials);

// Tensorized half-line Gauss rule with the density absorbed into weights.
QuadratureGrid quadrature_grid(const Measure& orthant_product, int nodes_per_dim);

void write_samples_csv(std::ostream& os, const Measure& measure, std::uint64_t seed,
                       const Mat& points, const std::string& version);

}  // namespace plab
