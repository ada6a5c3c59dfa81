#include "plab/transport.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "plab/errors.hpp"

namespace plab {

namespace {

void check_builtin_target(const Potential& pot, const Vec& y) {
  if (y.size() != pot.dimension()) throw DomainError("target dimension mismatch");
  if (!y.allFinite()) throw DomainError("target has non-finite coordinates");
  if (pot.kind() == Potential::Kind::simplex) {
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      if (y[i] <= 0.0) throw DomainError("target outside the open corner simplex: y_i <= 0");
      s += y[i];
    }
    if (s >= 1.0) throw DomainError("target outside the open corner simplex: sum >= 1");
  } else if (pot.kind() == Potential::Kind::exponential) {
    for (int i = 0; i < y.size(); ++i)
      if (y[i] <= 0.0) throw DomainError("target outside the open orthant: y_i <= 0");
  }
}

double log_det_spd(const Mat& h) {
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success)
    throw ModelViolation("hessian not positive definite in log-determinant");
  double s = 0.0;
  for (int i = 0; i < h.rows(); ++i) s += std::log(llt.matrixL()(i, i));
  return 2.0 * s;
}

}  // namespace

Vec moment_map(const Potential& pot, const Vec& x) { return pot.gradient(x); }

Vec inverse_moment_map(const Potential& pot, const Vec& y) {
  check_builtin_target(pot, y);
  const int n = pot.dimension();
  const double tol = 1e-10 * (1.0 + y.cwiseAbs().maxCoeff());
  Vec x = Vec::Zero(n);
  auto objective = [&](const Vec& p) -> double {
    try {
      return pot.value(p) - p.dot(y);
    } catch (const EvaluationError&) {
      return std::numeric_limits<double>::infinity();  // line search backs off
    }
  };
  double fx = objective(x);

  // Full Newton steps in the quadratic basin; the gradient tolerance alone
  // leaves x-error ~ |H^-1| * tol when the hessian is ill-conditioned.
  auto polish = [&](Vec p) {
    for (int it = 0; it < 3; ++it) {
      Vec g = pot.gradient(p) - y;
      Vec step = pot.hessian(p).ldlt().solve(-g);
      if (!step.allFinite()) break;
      p += step;
      if (step.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + p.cwiseAbs().maxCoeff())) break;
    }
    return p;
  };

  for (int iter = 0; iter < 200; ++iter) {
    Vec grad = pot.gradient(x) - y;
    if (grad.cwiseAbs().maxCoeff() <= tol) return polish(x);
    Mat h = pot.hessian(x);
    Vec dir = h.ldlt().solve(-grad);
    double t = 1.0;
    Vec xn = x + dir;
    double fn = objective(xn);
    int halvings = 0;
    while (!(fn < fx) && halvings < 60) {
      t *= 0.5;
      xn = x + t * dir;
      fn = objective(xn);
      ++halvings;
    }
    if (!(fn < fx)) {
      // objective differences at floating-point resolution
      x = polish(x);
      if ((pot.gradient(x) - y).cwiseAbs().maxCoeff() <= tol) return x;
      throw ConvergenceError("inverse moment map: line search stalled away from the solution");
    }
    x = xn;
    fx = fn;
  }
  x = polish(x);
  if ((pot.gradient(x) - y).cwiseAbs().maxCoeff() <= tol) return x;
  throw ConvergenceError("inverse moment map: Newton did not converge in 200 iterations");
}

double transport_density(const Potential& pot, const Vec& x) {
  double d = pot.hessian(x).determinant();
  if (!(d > 0.0)) throw ModelViolation("transport density det hess(psi) is not positive");
  return d;
}

Mat log_density_hessian_fd(const Potential& pot, const Vec& x) {
  const int n = pot.dimension();
  auto ell = [&](const Vec& p) { return log_det_spd(pot.hessian(p)); };
  // When the hessian itself comes from finite differences its ~1e-8 noise
  // forces a much larger outer step.
  const double base = pot.mode() == DerivativeMode::closed_form ? 2e-4 : 2e-2;
  Mat m(n, n);
  double f0 = ell(x);
  for (int i = 0; i < n; ++i) {
    double hi = base * (1.0 + std::fabs(x[i]));
    {
      Vec xp = x, xm = x;
      xp[i] += hi;
      xm[i] -= hi;
      m(i, i) = (ell(xp) - 2.0 * f0 + ell(xm)) / (hi * hi);
    }
    for (int j = 0; j < i; ++j) {
      double hj = base * (1.0 + std::fabs(x[j]));
      Vec a = x, b = x, c = x, d = x;
      a[i] += hi; a[j] += hj;
      b[i] += hi; b[j] -= hj;
      c[i] -= hi; c[j] += hj;
      d[i] -= hi; d[j] -= hj;
      double v = (ell(a) - ell(b) - ell(c) + ell(d)) / (4.0 * hi * hj);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

LogConcavityReport log_concavity_probe(const Potential& pot, const std::vector<Vec>& probes) {
  LogConcavityReport rep;
  rep.probes = static_cast<int>(probes.size());
  rep.worst_eigenvalue = -std::numeric_limits<double>::infinity();
  for (const Vec& p : probes) {
    Mat m = log_density_hessian_fd(pot, p);
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    double lmax = es.eigenvalues().maxCoeff();
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    rep.worst_eigenvalue = std::max(rep.worst_eigenvalue, lmax);
    if (lmax > 1e-6 * scale) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

Mat ricci_matrix(const Potential& pot, const Vec& x) {
  const int n = pot.dimension();
  switch (pot.kind()) {
    case Potential::Kind::simplex:
      // log rho = -(n+1) psi + sum x_j, so Ric = (n+1)/2 * hess(psi)
      return 0.5 * (n + 1) * pot.hessian(x);
    case Potential::Kind::exponential:
      return Mat::Zero(n, n);
    case Potential::Kind::custom:
      return -0.5 * log_density_hessian_fd(pot, x);
  }
  return Mat::Zero(n, n);
}

Tensor3 christoffel_contraction(const Potential& pot, const Vec& x) {
  const int n = pot.dimension();
  Mat h = pot.hessian(x);
  Eigen::LDLT<Mat> ldlt(h);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw ModelViolation("christoffel contraction: singular hessian");
  Mat hinv = ldlt.solve(Mat::Identity(n, n));
  Tensor3 t = pot.third(x);
  Tensor3 gamma(n);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += hinv(l, m) * t(j, k, m);
        gamma(l, j, k) = s;
      }
  return gamma;
}

Mat qstar_matrix(const Potential& pot, const Vec& x) {
  const int n = pot.dimension();
  Tensor3 gamma = christoffel_contraction(pot, x);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += gamma(l, j, k) * gamma(k, i, l);
      m(i, j) = s;
      m(j, i) = s;
    }
  return m;
}

TransportContext::TransportContext(const Potential& pot, Vec y) : y_(std::move(y)) {
  x_ = inverse_moment_map(pot, y_);
  hess_ = pot.hessian(x_);
  qstar_ = qstar_matrix(pot, x_);
  Eigen::SelfAdjointEigenSolver<Mat> es(qstar_);
  const int n = pot.dimension();
  eigs_ = Vec(n);
  eigvecs_ = Mat(n, n);
  for (int i = 0; i < n; ++i) {  // descending order
    eigs_[i] = es.eigenvalues()[n - 1 - i];
    eigvecs_.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  double lmax = eigs_.size() > 0 ? eigs_[0] : 0.0;
  rank_ = 0;
  for (int i = 0; i < n; ++i)
    if (eigs_[i] > kQstarRankCutoff * lmax && eigs_[i] > 0.0) ++rank_;
}

double TransportContext::q_form(const Vec& U) const {
  Vec w = hess_ * U;
  double wn = w.norm();
  if (wn == 0.0) return 0.0;
  double val = 0.0;
  double captured = 0.0;
  for (int a = 0; a < rank_; ++a) {
    double c = eigvecs_.col(a).dot(w);
    val += c * c / eigs_[a];
    captured += c * c;
  }
  double residual = std::sqrt(std::max(0.0, wn * wn - captured));
  if (residual > std::sqrt(kQstarRankCutoff) * wn)
    return std::numeric_limits<double>::infinity();
  return 4.0 * val;
}

Vec TransportContext::maximizer(const Vec& U) const {
  Vec w = hess_ * U;
  Vec mw = Vec::Zero(w.size());
  double quad = 0.0;
  for (int a = 0; a < rank_; ++a) {
    double c = eigvecs_.col(a).dot(w);
    mw += (c / eigs_[a]) * eigvecs_.col(a);
    quad += c * c / eigs_[a];
  }
  if (quad <= 0.0) return Vec::Zero(w.size());
  return mw / std::sqrt(quad);
}

QuadraticFormReport quadratic_form_report(const Potential& pot, const Vec& y,
                                          const std::vector<Vec>& directions) {
  TransportContext ctx(pot, y);
  QuadraticFormReport rep;
  rep.base_point_in_K = ctx.base_point();
  rep.preimage_x = ctx.preimage();
  rep.qstar_matrix = ctx.qstar();
  rep.eigenvalues = ctx.eigenvalues();
  rep.rank = ctx.rank();
  for (const Vec& u : directions) rep.q_values.emplace_back(u, ctx.q_form(u));
  return rep;
}

double q_form(const Potential& pot, const Vec& y, const Vec& U) {
  return TransportContext(pot, y).q_form(U);
}

SimplexQResult simplex_q_form_detail(const Vec& y_in, const Vec& U) {
  const int n = static_cast<int>(y_in.size());
  if (U.size() != n) throw DomainError("direction dimension mismatch");
  Vec y = y_in;
  {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (y[i] <= 0.0) throw DomainError("simplex q-form: point outside open corner simplex");
      s += y[i];
    }
    if (s >= 1.0) throw DomainError("simplex q-form: point outside open corner simplex");
  }

  SimplexQResult res;
  const double delta = kSimplexSingularBand;
  for (int attempt = 0; attempt < 64; ++attempt) {
    double x0 = 1.0 - y.sum();
    double dmin = std::fabs(1.0 - 2.0 * x0);
    for (int i = 0; i < n; ++i) dmin = std::min(dmin, std::fabs(1.0 - 2.0 * y[i]));
    if (dmin >= delta) break;
    res.perturbed = true;
    Vec b = Vec::Constant(n, 1.0 / (n + 1));
    Vec dir = b - y;
    double dn = dir.norm();
    if (dn < delta)  // at the barycenter itself (n = 1 singular center)
      dir = Vec::Constant(n, -1.0 / std::sqrt(static_cast<double>(n)));
    else
      dir /= dn;
    y += 10.0 * delta * dir;
  }

  double x0 = 1.0 - y.sum();
  double sum_all = x0 * x0 / (1.0 - 2.0 * x0);
  double quad = 0.0, mixed = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    double c = y[i] * y[i] / (1.0 - 2.0 * y[i]);
    sum_all += c;
    quad += c * U[i] * U[i];
    mixed += c * U[i];
    scale += std::fabs(c) * U[i] * U[i];
  }
  double v = 4.0 * (quad - mixed * mixed / sum_all);
  double band = 1e-9 * (4.0 * scale + 1e-300);
  if (v < 0.0) {
    if (v < -band) throw ModelViolation("simplex q-form evaluated negative beyond tolerance");
    v = 0.0;
  }
  res.value = v;
  return res;
}

double simplex_q_form(const Vec& y, const Vec& U) { return simplex_q_form_detail(y, U).value; }

namespace {

// S = hess(phi) - 1/2 Gamma . grad(phi) + Ric; the scale is the ingredient
// magnitude before cancellation, used by the PSD tolerance.
std::pair<Mat, double> star_matrix_scaled(const Potential& pot, const ScalarField& phi,
                                          const Vec& x) {
  const int n = pot.dimension();
  Mat hphi = phi.hessian(x);
  Vec g = phi.gradient(x);
  Tensor3 gamma = christoffel_contraction(pot, x);
  Mat corr = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double c = 0.0;
      for (int k = 0; k < n; ++k) c += gamma(k, i, l) * g[k];
      corr(i, l) = 0.5 * c;
    }
  Mat ric = ricci_matrix(pot, x);
  Mat s = hphi - corr + ric;
  s = 0.5 * (s + s.transpose());
  double scale = hphi.norm() + corr.norm() + ric.norm() + 1e-12;
  return {s, scale};
}

}  // namespace

Mat star_condition_matrix(const Potential& pot, const ScalarField& phi, const Vec& x) {
  return star_matrix_scaled(pot, phi, x).first;
}

StarConditionReport star_condition_check(const Potential& pot, const ScalarField& phi,
                                         const std::vector<Vec>& probes) {
  StarConditionReport rep;
  rep.probe_points = probes;
  rep.min_eigenvalue_overall = std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (const Vec& x : probes) {
    auto [s, scale] = star_matrix_scaled(pot, phi, x);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    double lmin = es.eigenvalues().minCoeff();
    rep.min_eigenvalue_overall = std::min(rep.min_eigenvalue_overall, lmin);
    if (lmin < -1e-8 * scale) rep.pass = false;
  }
  return rep;
}

ScalarField pullback_weight(const Potential& pot, const ScalarField& w_on_K) {
  auto value = [pot, w_on_K](const Vec& x) { return w_on_K.value(pot.gradient(x)); };
  auto gradient = [pot, w_on_K](const Vec& x) {
    Vec y = pot.gradient(x);
    return Vec(pot.hessian(x) * w_on_K.gradient(y));
  };
  auto hessian = [pot, w_on_K](const Vec& x) {
    const int n = pot.dimension();
    Vec y = pot.gradient(x);
    Mat h = pot.hessian(x);
    Mat hw = w_on_K.hessian(y);
    Vec gw = w_on_K.gradient(y);
    Mat out = h * hw * h;
    Tensor3 t = pot.third(x);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double c = 0.0;
        for (int a = 0; a < n; ++a) c += t(a, i, l) * gw[a];
        out(i, l) += c;
      }
    return Mat(0.5 * (out + out.transpose()));
  };
  return ScalarField(value, gradient, hessian, "pullback(" + w_on_K.name() + ")");
}

}  // namespace plab
