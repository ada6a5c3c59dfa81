#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plab/field.hpp"
#include "plab/measures.hpp"
#include "plab/potential.hpp"
#include "plab/test_function.hpp"
#include "plab/transport.hpp"

namespace plab {

enum class Status { PASS, FAIL, INCONCLUSIVE };

std::string to_string(Status s);

struct GateResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct EstimatorInfo {
  std::string kind;  // "exact" | "quadrature" | "mc"
  long samples = 0;
  int nodes = 0;
  std::uint64_t seed = 0;
};

// Statistically qualified outcome of one inequality instance. FAIL requires
// z < -4; a negative margin inside the 4-sigma band stays INCONCLUSIVE.
struct Verdict {
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  Status status = Status::INCONCLUSIVE;
  double flagged_singular_fraction = 0.0;
  std::vector<GateResult> gates;
  EstimatorInfo estimator;

  double margin() const { return rhs - lhs; }
  double z_margin() const;
  bool gates_ok() const;
};

Status classify_margin(double lhs, double lhs_se, double rhs, double rhs_se);

struct EstimatorSettings {
  std::string mode = "auto";  // auto | exact | quadrature | mc
  long mc_samples = 100000;
  int quad_nodes = 200;
  std::uint64_t seed = 1;
  int jobs = 1;
};

// ---- inequality variants ----------------------------------------------

struct Thm11Spec {
  Measure mu;  // orthant product
  int k = 2;
};

struct Thm61Spec {
  Measure mu;
  std::vector<double> k;  // all > 1, not necessarily integers
};

struct Cor12Spec {
  std::function<bool(const Vec&)> contains;
  Vec box_lo, box_hi;
  double ell = 2.0;
};

struct Thm13Spec {
  Measure mu;  // unconditional on R^n
  int k = 2;
  bool unconditional_f = false;
};

enum class SimplexVariant { Cor42, Thm43, Cor44 };

struct SimplexSpec {
  int n = 2;
  SimplexVariant variant = SimplexVariant::Cor44;
};

struct Thm45Spec {
  int n = 2;
  ScalarField phi;  // on R_+^{n+1}
  double q = 0.0;
};

struct Prop36Spec {
  Potential pot;
  ScalarField phi_x;  // weight in the x-chart
  Measure nu;         // realized pushforward measure (simplex family or orthant)
};

using InequalitySpec =
    std::variant<SimplexSpec, Thm11Spec, Thm61Spec, Cor12Spec, Thm13Spec, Thm45Spec, Prop36Spec>;

std::string variant_name(const InequalitySpec& spec);

// Ambient dimension the test functions of this variant live in.
int probe_dimension(const InequalitySpec& spec);

// The expected f's are already centered; centering standard errors carried by
// the functions are folded into lhs_se. One batch of samples (and per-point
// transport geometry) is shared across the whole suite.
std::vector<Verdict> evaluate_suite(const InequalitySpec& spec,
                                    const std::vector<TestFunction>& fs,
                                    const EstimatorSettings& settings);

Verdict evaluate(const InequalitySpec& spec, const TestFunction& f,
                 const EstimatorSettings& settings);

// Named wrappers matching the per-theorem operations.
Verdict evaluate_thm11(const Measure& mu, const TestFunction& f, int k,
                       const EstimatorSettings& settings);
Verdict evaluate_thm61(const Measure& mu, const TestFunction& f, const std::vector<double>& k,
                       const EstimatorSettings& settings);
Verdict evaluate_cor12(const Cor12Spec& set, const TestFunction& f,
                       const EstimatorSettings& settings);
Verdict evaluate_thm13(const Measure& mu, const TestFunction& f, int k, bool unconditional_f,
                       const EstimatorSettings& settings);
Verdict evaluate_simplex(SimplexVariant variant, int n, const TestFunction& f,
                         const EstimatorSettings& settings);
Verdict evaluate_thm45(const ScalarField& phi, double q, int n, const TestFunction& f,
                       const EstimatorSettings& settings);
Verdict evaluate_prop36(const Prop36Spec& spec, const TestFunction& f,
                        const EstimatorSettings& settings);

// Centers f for the variant's measure; MC centering uses a stream derived
// from the seed, independent of the evaluation stream.
TestFunction center_for(const InequalitySpec& spec, const TestFunction& f,
                        const EstimatorSettings& settings);

// count random centered polynomials of the given degree for the variant.
std::vector<TestFunction> make_centered_suite(const InequalitySpec& spec, int count, int degree,
                                              std::uint64_t seed,
                                              const EstimatorSettings& settings);

struct SharpnessReport {
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
};

// Equality case of the n+1 eigenvalue bound: f = x_1 - 1/(n+1) through the
// exact moment oracle.
SharpnessReport sharpness_probe(SimplexVariant variant, int n);

}  // namespace plab
