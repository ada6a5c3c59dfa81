#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "plab/field.hpp"
#include "plab/linalg.hpp"
#include "plab/potential.hpp"

namespace plab {

// Relative eigenvalue cutoff separating the retained eigenspace of Q* from
// its numerical null space; also decides finite vs +infinity in q_form.
inline constexpr double kQstarRankCutoff = 1e-10;

// Distance to the 1-2y_k = 0 singular set below which closed-form simplex
// evaluations step toward the barycenter.
inline constexpr double kSimplexSingularBand = 1e-7;

Vec moment_map(const Potential& pot, const Vec& x);

// Damped Newton for grad psi(x) = y on the strictly convex objective
// psi(x) - <x,y>; throws DomainError for boundary/outside targets of the
// built-ins and ConvergenceError after 200 iterations.
Vec inverse_moment_map(const Potential& pot, const Vec& y);

double transport_density(const Potential& pot, const Vec& x);

// Central-difference Hessian of log det hess(psi); step 2e-4*(1+|x_i|).
Mat log_density_hessian_fd(const Potential& pot, const Vec& x);

struct LogConcavityReport {
  int probes = 0;
  int violations = 0;
  double worst_eigenvalue = 0.0;  // most positive eigenvalue seen
  bool pass = false;
};

LogConcavityReport log_concavity_probe(const Potential& pot, const std::vector<Vec>& probes);

// -1/2 hess(log rho_psi); closed form for the built-ins, finite differences
// otherwise.
Mat ricci_matrix(const Potential& pot, const Vec& x);

// Gamma^l_{jk} = sum_m psi^{lm} psi_{jkm}, indexed (l, j, k).
Tensor3 christoffel_contraction(const Potential& pot, const Vec& x);

// M_ij = sum_{k,l,m,p} psi^{lm} psi_{jkm} psi^{kp} psi_{ilp}, evaluated as
// trace(A_i A_j) over the Christoffel slices.
Mat qstar_matrix(const Potential& pot, const Vec& x);

// Everything q_form needs at one base point y in K, reusable across many
// directions U.
class TransportContext {
 public:
  TransportContext(const Potential& pot, Vec y);

  const Vec& base_point() const { return y_; }
  const Vec& preimage() const { return x_; }
  const Mat& hessian() const { return hess_; }
  const Mat& qstar() const { return qstar_; }
  const Vec& eigenvalues() const { return eigs_; }  // descending
  int rank() const { return rank_; }

  // 4 w' M^+ w with w = hess * U, or +infinity when w leaves the retained
  // eigenspace by more than sqrt(cutoff)*|w|.
  double q_form(const Vec& U) const;

  // The supremum-attaining direction M^+ w / sqrt(w' M^+ w); zero vector if
  // q_form(U) is 0 or infinite.
  Vec maximizer(const Vec& U) const;

 private:
  Vec y_, x_;
  Mat hess_, qstar_;
  Mat eigvecs_;  // columns, matching eigs_ (descending)
  Vec eigs_;
  int rank_ = 0;
};

struct QuadraticFormReport {
  Vec base_point_in_K;
  Vec preimage_x;
  Mat qstar_matrix;
  Vec eigenvalues;  // descending
  int rank = 0;
  std::vector<std::pair<Vec, double>> q_values;
};

QuadraticFormReport quadratic_form_report(const Potential& pot, const Vec& y,
                                          const std::vector<Vec>& directions);

double q_form(const Potential& pot, const Vec& y, const Vec& U);

struct SimplexQResult {
  double value = 0.0;
  bool perturbed = false;
};

// Closed form of the simplex quadratic form (factor 4 included); perturbs
// toward the barycenter near the 1-2y_k = 0 set and reports the flag.
SimplexQResult simplex_q_form_detail(const Vec& y, const Vec& U);
double simplex_q_form(const Vec& y, const Vec& U);

// The Bakry-Emery-Ricci matrix: hess(phi) - 1/2 <Gamma, grad phi> + Ric_psi,
// with phi given in the x-chart.
Mat star_condition_matrix(const Potential& pot, const ScalarField& phi, const Vec& x);

struct StarConditionReport {
  std::vector<Vec> probe_points;
  double min_eigenvalue_overall = 0.0;
  bool pass = false;
};

StarConditionReport star_condition_check(const Potential& pot, const ScalarField& phi,
                                         const std::vector<Vec>& probes);

// Weight on K pulled back through the moment map: phi(x) = w(grad psi(x)).
ScalarField pullback_weight(const Potential& pot, const ScalarField& w_on_K);

}  // namespace plab
