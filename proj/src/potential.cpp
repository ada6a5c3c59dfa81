#include "plab/potential.hpp"

#include <cmath>

#include "plab/errors.hpp"

namespace plab {

namespace {

double logsumexp_shifted(const Vec& x) {
  double m = 0.0;  // the implicit constant term e^0
  for (int i = 0; i < x.size(); ++i) m = std::max(m, x[i]);
  double s = std::exp(-m);
  for (int i = 0; i < x.size(); ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

}  // namespace

Potential Potential::simplex(int n) {
  if (n < 1) throw DomainError("simplex potential requires n >= 1");
  return Potential(n, Kind::simplex, DerivativeMode::closed_form);
}

Potential Potential::exponential(int n) {
  if (n < 1) throw DomainError("exponential potential requires n >= 1");
  return Potential(n, Kind::exponential, DerivativeMode::closed_form);
}

Potential Potential::custom(int n, std::function<double(const Vec&)> value, FdSteps steps) {
  if (n < 1) throw DomainError("custom potential requires n >= 1");
  if (!value) throw DomainError("custom potential requires a value callable");
  Potential p(n, Kind::custom, DerivativeMode::finite_difference);
  p.steps_ = steps;
  p.custom_value_ = std::move(value);
  return p;
}

void Potential::check_point(const Vec& x) const {
  if (x.size() != n_) throw DomainError("point dimension mismatch");
  if (!x.allFinite()) throw DomainError("point has non-finite coordinates");
}

double Potential::raw_value(const Vec& x) const {
  switch (kind_) {
    case Kind::simplex:
      return logsumexp_shifted(x);
    case Kind::exponential: {
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += std::exp(x[i]);
      return s;
    }
    case Kind::custom:
      return custom_value_(x);
  }
  return 0.0;
}

double Potential::value(const Vec& x) const {
  check_point(x);
  double v = raw_value(x);
  if (!std::isfinite(v)) throw EvaluationError("potential value overflowed at the requested point");
  return v;
}

Vec Potential::gradient(const Vec& x) const {
  check_point(x);
  Vec g(n_);
  switch (kind_) {
    case Kind::simplex: {
      double psi = logsumexp_shifted(x);
      for (int i = 0; i < n_; ++i) g[i] = std::exp(x[i] - psi);
      break;
    }
    case Kind::exponential:
      for (int i = 0; i < n_; ++i) g[i] = std::exp(x[i]);
      break;
    case Kind::custom:
      g = fd_gradient(x);
      break;
  }
  if (!g.allFinite()) throw EvaluationError("potential gradient overflowed");
  return g;
}

Mat Potential::hessian(const Vec& x) const {
  check_point(x);
  Mat h(n_, n_);
  switch (kind_) {
    case Kind::simplex: {
      Vec v = gradient(x);
      h = -v * v.transpose();
      h.diagonal() += v;
      break;
    }
    case Kind::exponential: {
      h.setZero();
      for (int i = 0; i < n_; ++i) h(i, i) = std::exp(x[i]);
      break;
    }
    case Kind::custom:
      h = fd_hessian(x);
      break;
  }
  if (!h.allFinite()) throw EvaluationError("potential hessian overflowed");
  return h;
}

Tensor3 Potential::third(const Vec& x) const {
  check_point(x);
  Tensor3 t(n_);
  switch (kind_) {
    case Kind::simplex: {
      // psi_{ijk} = 2 v_i v_j v_k + v_i d_{ij} d_{jk}
      //            - (v_j v_k d_{ij} + v_i v_j d_{ik} + v_i v_k d_{jk})
      Vec v = gradient(x);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k) {
            double val = 2.0 * v[i] * v[j] * v[k];
            if (i == j && j == k) val += v[i];
            if (i == j) val -= v[j] * v[k];
            if (i == k) val -= v[i] * v[j];
            if (j == k) val -= v[i] * v[k];
            t(i, j, k) = val;
          }
      break;
    }
    case Kind::exponential:
      for (int i = 0; i < n_; ++i) t(i, i, i) = std::exp(x[i]);
      break;
    case Kind::custom:
      t = fd_third(x);
      break;
  }
  if (!t.all_finite()) throw EvaluationError("potential third tensor overflowed");
  return symmetrize_third(t).first;
}

DerivativeBundle Potential::bundle(const Vec& x, int order) const {
  if (order < 0 || order > 3) throw DomainError("derivative order must be in 0..3");
  DerivativeBundle b;
  b.value = value(x);
  if (order >= 1) b.gradient = gradient(x);
  if (order >= 2) b.hessian = hessian(x);
  if (order >= 3) b.third = third(x);
  return b;
}

Vec Potential::fd_gradient(const Vec& x) const {
  Vec g(n_);
  for (int i = 0; i < n_; ++i) {
    double h = steps_.gradient * (1.0 + std::fabs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (raw_value(xp) - raw_value(xm)) / (2.0 * h);
  }
  return g;
}

Mat Potential::fd_hessian(const Vec& x) const {
  Mat m(n_, n_);
  double f0 = raw_value(x);
  for (int i = 0; i < n_; ++i) {
    double hi = steps_.hessian * (1.0 + std::fabs(x[i]));
    {
      Vec xp = x, xm = x;
      xp[i] += hi;
      xm[i] -= hi;
      m(i, i) = (raw_value(xp) - 2.0 * f0 + raw_value(xm)) / (hi * hi);
    }
    for (int j = 0; j < i; ++j) {
      double hj = steps_.hessian * (1.0 + std::fabs(x[j]));
      Vec a = x, b = x, c = x, d = x;
      a[i] += hi; a[j] += hj;
      b[i] += hi; b[j] -= hj;
      c[i] -= hi; c[j] += hj;
      d[i] -= hi; d[j] -= hj;
      double v = (raw_value(a) - raw_value(b) - raw_value(c) + raw_value(d)) / (4.0 * hi * hj);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Tensor3 Potential::fd_third(const Vec& x) const {
  // One canonical stencil per unordered index triple, copied to all
  // permutation slots, so the result is symmetric by construction.
  Tensor3 t(n_);
  auto step = [&](int i) { return steps_.third * (1.0 + std::fabs(x[i])); };

  for (int i = 0; i < n_; ++i) {
    double hi = step(i);
    // T_iii
    Vec p2 = x, p1 = x, m1 = x, m2 = x;
    p2[i] += 2 * hi; p1[i] += hi; m1[i] -= hi; m2[i] -= 2 * hi;
    t(i, i, i) =
        (raw_value(p2) - 2 * raw_value(p1) + 2 * raw_value(m1) - raw_value(m2)) /
        (2.0 * hi * hi * hi);

    // T_iij: second difference in i, first central difference in j
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      double hj = step(j);
      auto dii = [&](double shift_j) {
        Vec base = x;
        base[j] += shift_j;
        Vec xp = base, xm = base;
        xp[i] += hi;
        xm[i] -= hi;
        return (raw_value(xp) - 2.0 * raw_value(base) + raw_value(xm)) / (hi * hi);
      };
      double v = (dii(hj) - dii(-hj)) / (2.0 * hj);
      t(i, i, j) = v;
      t(i, j, i) = v;
      t(j, i, i) = v;
    }
  }

  // distinct triples i<j<k: eight-corner stencil
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k) {
        double hi = step(i), hj = step(j), hk = step(k);
        double acc = 0.0;
        for (int si = -1; si <= 1; si += 2)
          for (int sj = -1; sj <= 1; sj += 2)
            for (int sk = -1; sk <= 1; sk += 2) {
              Vec p = x;
              p[i] += si * hi;
              p[j] += sj * hj;
              p[k] += sk * hk;
              acc += si * sj * sk * raw_value(p);
            }
        double v = acc / (8.0 * hi * hj * hk);
        t(i, j, k) = v; t(i, k, j) = v;
        t(j, i, k) = v; t(j, k, i) = v;
        t(k, i, j) = v; t(k, j, i) = v;
      }
  return t;
}

std::pair<Tensor3, double> symmetrize_third(const Tensor3& raw) {
  int n = raw.dim();
  Tensor3 sym(n);
  double score = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double avg = (raw(i, j, k) + raw(i, k, j) + raw(j, i, k) + raw(j, k, i) +
                      raw(k, i, j) + raw(k, j, i)) /
                     6.0;
        sym(i, j, k) = avg;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        score = std::max(score, std::fabs(raw(i, j, k) - sym(i, j, k)));
  return {sym, score};
}

}  // namespace plab
