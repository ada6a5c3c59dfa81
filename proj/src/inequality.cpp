#include "plab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plab/errors.hpp"
#include "plab/rng.hpp"
#include "plab/stats.hpp"

namespace plab {

namespace {

constexpr std::uint64_t kRoleCenter = 0xCE47;
constexpr std::uint64_t kRoleSuite = 0x5EED;
constexpr std::uint64_t kRoleGate = 0x6A7E;
constexpr std::uint64_t kRoleMoments = 0x3E0D;
constexpr std::uint64_t kRoleCor12 = 0xC012;

constexpr double kExactRoundoff = 64.0 * 2.220446049250313e-16;

double poincare_coeff(double k) { return k * k / (k - 1.0); }

// ---- polynomial helpers for the exact path ------------------------------

std::vector<PolyTerm> centered_terms(const TestFunction& f) {
  std::vector<PolyTerm> ts = f.terms();
  if (f.center_offset() != 0.0) {
    PolyTerm c;
    c.exponents.assign(f.dimension(), 0);
    c.coefficient = -f.center_offset();
    ts.push_back(c);
  }
  return ts;
}

std::vector<PolyTerm> poly_partial(const std::vector<PolyTerm>& ts, int i) {
  std::vector<PolyTerm> out;
  for (const auto& t : ts) {
    if (t.exponents[i] == 0) continue;
    PolyTerm u = t;
    u.coefficient *= t.exponents[i];
    --u.exponents[i];
    out.push_back(u);
  }
  return out;
}

std::vector<PolyTerm> poly_diff(const std::vector<PolyTerm>& a, const std::vector<PolyTerm>& b) {
  std::vector<PolyTerm> out = a;
  for (auto t : b) {
    t.coefficient = -t.coefficient;
    out.push_back(t);
  }
  return out;
}

// E[ x^extra * A * B ] against an exact moment oracle
double pair_moment(const Measure& mu, const std::vector<PolyTerm>& a,
                   const std::vector<PolyTerm>& b, const MultiIndex& extra) {
  KahanSum s;
  MultiIndex m(extra);
  for (const auto& ta : a)
    for (const auto& tb : b) {
      for (size_t i = 0; i < m.size(); ++i)
        m[i] = extra[i] + ta.exponents[i] + tb.exponents[i];
      s.add(ta.coefficient * tb.coefficient * mu.exact_polynomial_moment(m));
    }
  return s.value();
}

// ---- verdict assembly ----------------------------------------------------

Verdict finish_mc(const std::vector<double>& lhs_vals, const std::vector<double>& rhs_vals,
                  const TestFunction& f, EstimatorInfo est, std::vector<GateResult> gates,
                  double flagged_fraction) {
  Verdict v;
  v.gates = std::move(gates);
  v.estimator = std::move(est);
  v.flagged_singular_fraction = flagged_fraction;
  auto lm = mean_with_se(lhs_vals);
  v.lhs = lm.mean;
  double s = f.centering_se();
  v.lhs_se = lm.se + s * s;
  bool infinite = false;
  for (double r : rhs_vals)
    if (std::isinf(r)) infinite = true;
  if (infinite) {
    v.rhs = std::numeric_limits<double>::infinity();
    v.rhs_se = 0.0;
    long flagged = 0;
    for (double r : rhs_vals)
      if (std::isinf(r)) ++flagged;
    v.flagged_singular_fraction =
        std::max(v.flagged_singular_fraction,
                 static_cast<double>(flagged) / static_cast<double>(rhs_vals.size()));
  } else {
    auto rm = mean_with_se(rhs_vals);
    v.rhs = rm.mean;
    v.rhs_se = rm.se;
  }
  v.status = classify_margin(v.lhs, v.lhs_se, v.rhs, v.rhs_se);
  return v;
}

// integrand of the corner-simplex closed forms given the full coordinate vector
// and the ambient gradient; clamps the tiny negative band to zero.
double corner_form_value(const Vec& x, const Vec& grad) {
  const int m = static_cast<int>(x.size());  // n+1
  double C = 0.0, quad = 0.0, mixed = 0.0, scale = 0.0;
  double d0 = grad[0];
  for (int k = 0; k < m; ++k) C += x[k] * x[k] / (1.0 - 2.0 * x[k]);
  for (int i = 1; i < m; ++i) {
    double ci = x[i] * x[i] / (1.0 - 2.0 * x[i]);
    double di = grad[i] - d0;
    quad += ci * di * di;
    mixed += ci * di;
    scale += std::fabs(ci) * di * di;
  }
  double v = 4.0 * (quad - mixed * mixed / C);
  double band = 1e-9 * (4.0 * scale + 1e-300);
  if (v < 0.0) {
    if (v < -band) throw ModelViolation("corner-simplex form evaluated negative beyond tolerance");
    v = 0.0;
  }
  return v;
}

double pairwise_form_value(const Vec& x, const Vec& grad) {
  const int m = static_cast<int>(x.size());
  double C = 0.0;
  for (int k = 0; k < m; ++k) C += x[k] * x[k] / (1.0 - 2.0 * x[k]);
  double s = 0.0, scale = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double ci = x[i] * x[i] / (1.0 - 2.0 * x[i]);
      double cj = x[j] * x[j] / (1.0 - 2.0 * x[j]);
      double e = grad[i] - grad[j];
      s += ci * cj * e * e;
      scale += std::fabs(ci * cj) * e * e;
    }
  double v = 4.0 * s / C;
  double band = 1e-9 * (4.0 * scale / std::fabs(C) + 1e-300);
  if (v < 0.0) {
    if (v < -band) throw ModelViolation("pairwise simplex form evaluated negative beyond tolerance");
    v = 0.0;
  }
  return v;
}

double cpn_form_value(const Vec& x, const Vec& grad, int n) {
  const int m = static_cast<int>(x.size());
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double e = grad[i] - grad[j];
      s += x[i] * x[j] * e * e;
    }
  return s / (n + 1);
}

// The suites evaluate many functions against one sample batch; materialized
// rows avoid re-extracting Eigen rows in the inner loops.
std::vector<Vec> materialize_rows(const Mat& pts) {
  std::vector<Vec> xs;
  xs.reserve(pts.rows());
  for (long r = 0; r < pts.rows(); ++r) xs.push_back(pts.row(r).transpose());
  return xs;
}

// Pushes a simplex sample out of the |1-2x_k| < delta band toward the
// barycenter; returns true when the point was moved.
bool desingularize_simplex_point(Vec& x) {
  const double delta = kSimplexSingularBand;
  const int m = static_cast<int>(x.size());
  bool moved = false;
  for (int attempt = 0; attempt < 64; ++attempt) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) dmin = std::min(dmin, std::fabs(1.0 - 2.0 * x[k]));
    if (dmin >= delta) break;
    moved = true;
    Vec b = Vec::Constant(m, 1.0 / m);
    Vec dir = b - x;
    double dn = dir.norm();
    if (dn < delta) {
      dir = Vec::Constant(m, 0.0);
      dir[0] = 1.0 / std::sqrt(2.0);
      dir[m - 1] = -1.0 / std::sqrt(2.0);
    } else {
      dir /= dn;
    }
    x += 10.0 * delta * dir;
  }
  return moved;
}

// ---- gates ----------------------------------------------------------------

std::function<double(const Vec&)> joint_orthant_exponent(const Measure& mu) {
  auto factors = mu.factors();
  return [factors](const Vec& t) {
    double s = 0.0;
    for (size_t i = 0; i < factors.size(); ++i) s += factors[i].exponent(t[static_cast<int>(i)]);
    return s;
  };
}

GateResult gate_from_probe(const std::string& name, const ProbeReport& rep) {
  GateResult g;
  g.name = name;
  g.pass = rep.pass;
  std::ostringstream os;
  os << rep.violations << "/" << rep.trials << " violations, worst " << rep.worst;
  g.detail = os.str();
  return g;
}

std::vector<GateResult> thm11_gates(const Thm11Spec& spec, const EstimatorSettings& st) {
  std::uint64_t seed = CounterRng::derive_stream(kRoleGate, st.seed);
  auto phi = joint_orthant_exponent(spec.mu);
  auto rep = p_convexity_probe(phi, spec.mu.ambient_dimension(), 1.0 / spec.k, seed, 200);
  return {gate_from_probe("p_convexity(p=1/k)", rep)};
}

std::vector<GateResult> thm61_gates(const Thm61Spec& spec, const EstimatorSettings& st) {
  std::uint64_t seed = CounterRng::derive_stream(kRoleGate, st.seed);
  auto phi = joint_orthant_exponent(spec.mu);
  auto rep = power_convexity_probe(phi, spec.mu.ambient_dimension(), spec.k, seed, 200);
  return {gate_from_probe("power_convexity(k_i)", rep)};
}

std::vector<GateResult> cor12_gates(const Cor12Spec& spec, const EstimatorSettings& st) {
  std::uint64_t seed = CounterRng::derive_stream(kRoleGate, st.seed);
  auto rep =
      set_p_convexity_probe(spec.contains, spec.box_lo, spec.box_hi, 1.0 / spec.ell, seed, 200);
  return {gate_from_probe("set_p_convexity(p=1/l)", rep)};
}

std::vector<GateResult> thm13_gates(const Thm13Spec& spec, const TestFunction& f,
                                    const EstimatorSettings& st) {
  std::vector<GateResult> gates;
  if (spec.mu.is_lp_ball()) {
    gates.push_back({"measure_unconditional", true,
                     "l_p ball sampler applies independent random signs by construction"});
  } else {
    // sign-flip symmetry of coordinate marginals
    std::uint64_t seed = CounterRng::derive_stream(kRoleGate, st.seed + 1);
    Mat pts = spec.mu.sample(seed, 4096);
    bool ok = true;
    for (int i = 0; i < pts.cols() && ok; ++i) {
      std::vector<double> pos, neg;
      for (long r = 0; r < pts.rows(); ++r) {
        double v = pts(r, i);
        if (v > 0) pos.push_back(v);
        else if (v < 0) neg.push_back(-v);
      }
      if (pos.size() < 64 || neg.size() < 64) { ok = false; break; }
      ok = !ks_two_sample(pos, neg, 0.01).reject;
    }
    gates.push_back({"measure_unconditional", ok, "two-sample KS on |x_i| by sign class"});
  }
  if (spec.unconditional_f) {
    std::uint64_t seed = CounterRng::derive_stream(kRoleGate, st.seed + 2);
    Mat pts = spec.mu.sample(seed, 256);
    CounterRng rng(seed, 1);
    bool ok = true;
    double worst = 0.0;
    for (long r = 0; r < pts.rows() && ok; ++r) {
      Vec x = pts.row(r).transpose();
      double base = f.value(x);
      for (int rep = 0; rep < 8; ++rep) {
        Vec y = x;
        std::uint64_t bits = rng.next_u64();
        for (int i = 0; i < y.size(); ++i)
          if ((bits >> i) & 1) y[i] = -y[i];
        double d = std::fabs(f.value(y) - base);
        worst = std::max(worst, d);
        if (d > 1e-9 * (1.0 + std::fabs(base))) { ok = false; break; }
      }
    }
    std::ostringstream os;
    os << "worst sign-flip deviation " << worst;
    gates.push_back({"f_unconditional", ok, os.str()});
  }
  return gates;
}

std::vector<GateResult> thm45_gates(const Thm45Spec& spec, const EstimatorSettings& st) {
  std::uint64_t seed = CounterRng::derive_stream(kRoleGate, st.seed + 3);
  std::vector<GateResult> gates;
  auto hom = homogeneity_check(spec.phi, spec.n, spec.q, seed, 2000);
  {
    GateResult g;
    g.name = "phi_homogeneous(q)";
    g.pass = hom.homogeneous;
    std::ostringstream os;
    os << "worst relative deviation " << hom.worst_rel;
    g.detail = os.str();
    gates.push_back(g);
  }
  {
    GateResult g;
    g.name = "Mq_le_n";
    g.pass = hom.gate_pass;
    std::ostringstream os;
    os << "M=" << hom.sup_on_simplex << " Mq=" << hom.gate_value << " n=" << spec.n;
    g.detail = os.str();
    gates.push_back(g);
  }
  auto phi_fn = [&spec](const Vec& x) { return spec.phi.value(x); };
  auto rep = p_convexity_probe(phi_fn, spec.n + 1, 0.5, seed + 7, 200);
  gates.push_back(gate_from_probe("phi_half_convex", rep));
  return gates;
}

// ---- sample batches --------------------------------------------------------

struct SimplexBatch {
  Mat pts;  // N x (n+1), desingularized where the variant needs it
  double flagged_fraction = 0.0;
};

SimplexBatch make_simplex_batch(const Measure& mu, const EstimatorSettings& st,
                                bool desingularize) {
  SimplexBatch b;
  b.pts = mu.sample(st.seed, st.mc_samples);
  if (desingularize) {
    long flagged = 0;
    for (long r = 0; r < b.pts.rows(); ++r) {
      Vec x = b.pts.row(r).transpose();
      if (desingularize_simplex_point(x)) {
        b.pts.row(r) = x.transpose();
        ++flagged;
      }
    }
    b.flagged_fraction = static_cast<double>(flagged) / static_cast<double>(b.pts.rows());
  }
  return b;
}

Mat sample_cor12(const Cor12Spec& spec, std::uint64_t seed, long count) {
  const int n = static_cast<int>(spec.box_lo.size());
  Mat out(count, n);
  long done = 0;
  std::uint64_t chunk = 0;
  long proposals = 0, accepted = 0;
  Vec x(n);
  while (done < count) {
    long quota = std::min<long>(8192, count - done);
    CounterRng rng(seed, CounterRng::derive_stream(kRoleCor12, chunk));
    long got = 0;
    while (got < quota) {
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(spec.box_lo[i], spec.box_hi[i]);
      ++proposals;
      if (spec.contains(x)) {
        out.row(done + got) = x.transpose();
        ++got;
        ++accepted;
      }
      if (proposals >= 200000 && static_cast<double>(accepted) / proposals < 1e-4)
        throw ConvergenceError("cor12: bounding-box rejection acceptance below 1e-4");
    }
    done += got;
    ++chunk;
  }
  return out;
}

}  // namespace

// ---- public small pieces ----------------------------------------------------

std::string to_string(Status s) {
  switch (s) {
    case Status::PASS: return "PASS";
    case Status::FAIL: return "FAIL";
    case Status::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "?";
}

double Verdict::z_margin() const {
  if (std::isinf(rhs)) return std::numeric_limits<double>::infinity();
  double se = std::hypot(lhs_se, rhs_se);
  double m = margin();
  if (se == 0.0) {
    if (m > 0) return std::numeric_limits<double>::infinity();
    if (m < 0) return -std::numeric_limits<double>::infinity();
    return 0.0;
  }
  return m / se;
}

bool Verdict::gates_ok() const {
  for (const auto& g : gates)
    if (!g.pass) return false;
  return true;
}

Status classify_margin(double lhs, double lhs_se, double rhs, double rhs_se) {
  if (std::isinf(rhs)) return Status::PASS;
  double margin = rhs - lhs;
  double se = std::hypot(lhs_se, rhs_se);
  if (se == 0.0) return margin >= 0.0 ? Status::PASS : Status::FAIL;
  if (margin / se < -4.0) return Status::FAIL;
  if (margin >= 0.0) return Status::PASS;
  return Status::INCONCLUSIVE;
}

std::string variant_name(const InequalitySpec& spec) {
  if (std::holds_alternative<Thm11Spec>(spec)) return "Thm11";
  if (std::holds_alternative<Thm61Spec>(spec)) return "Thm61";
  if (std::holds_alternative<Cor12Spec>(spec)) return "Cor12";
  if (std::holds_alternative<Thm13Spec>(spec)) return "Thm13";
  if (auto* s = std::get_if<SimplexSpec>(&spec)) {
    switch (s->variant) {
      case SimplexVariant::Cor42: return "Cor42";
      case SimplexVariant::Thm43: return "Thm43";
      case SimplexVariant::Cor44: return "Cor44";
    }
  }
  if (std::holds_alternative<Thm45Spec>(spec)) return "Thm45";
  return "Prop36";
}

int probe_dimension(const InequalitySpec& spec) {
  if (auto* s = std::get_if<Thm11Spec>(&spec)) return s->mu.ambient_dimension();
  if (auto* s = std::get_if<Thm61Spec>(&spec)) return s->mu.ambient_dimension();
  if (auto* s = std::get_if<Cor12Spec>(&spec)) return static_cast<int>(s->box_lo.size());
  if (auto* s = std::get_if<Thm13Spec>(&spec)) return s->mu.ambient_dimension();
  if (auto* s = std::get_if<SimplexSpec>(&spec)) return s->n + 1;
  if (auto* s = std::get_if<Thm45Spec>(&spec)) return s->n + 1;
  const auto& p = std::get<Prop36Spec>(spec);
  return p.nu.ambient_dimension();
}

// ---- evaluators ---------------------------------------------------------------

namespace {

std::vector<Verdict> orthant_suite(const Measure& mu, const std::vector<double>& coeff,
                                   const std::vector<TestFunction>& fs,
                                   const EstimatorSettings& st, std::vector<GateResult> gates) {
  const int d = mu.ambient_dimension();
  std::vector<Verdict> out;
  bool quad = (st.mode == "quadrature") || (st.mode == "auto" && d <= 4);
  if (st.mode == "exact")
    throw CapabilityError("orthant inequalities have no exact estimator; use quadrature");

  if (quad) {
    QuadratureGrid full = quadrature_grid(mu, st.quad_nodes);
    QuadratureGrid half = quadrature_grid(mu, std::max(8, st.quad_nodes / 2));
    auto integrate = [&](const QuadratureGrid& g, const TestFunction& f, double& lhs,
                         double& rhs) {
      KahanSum l, r;
      for (long i = 0; i < g.nodes.rows(); ++i) {
        Vec x = g.nodes.row(i).transpose();
        double fv = f.value(x);
        Vec gr = f.gradient(x);
        double rv = 0.0;
        for (int c = 0; c < d; ++c) rv += coeff[c] * x[c] * x[c] * gr[c] * gr[c];
        l.add(g.weights[i] * fv * fv);
        r.add(g.weights[i] * rv);
      }
      lhs = l.value() / g.total_mass;
      rhs = r.value() / g.total_mass;
    };
    for (const auto& f : fs) {
      double lf, rf, lh, rh;
      integrate(full, f, lf, rf);
      integrate(half, f, lh, rh);
      Verdict v;
      v.gates = gates;
      v.estimator = {"quadrature", 0, st.quad_nodes, st.seed};
      v.lhs = lf;
      v.rhs = rf;
      double s = f.centering_se();
      v.lhs_se = std::fabs(lf - lh) + kExactRoundoff * std::fabs(lf) + s * s;
      v.rhs_se = std::fabs(rf - rh) + kExactRoundoff * std::fabs(rf);
      v.status = classify_margin(v.lhs, v.lhs_se, v.rhs, v.rhs_se);
      out.push_back(std::move(v));
    }
    return out;
  }

  auto xs = materialize_rows(mu.sample(st.seed, st.mc_samples));
  std::vector<double> lv(xs.size()), rv(xs.size());
  for (const auto& f : fs) {
    for (size_t i = 0; i < xs.size(); ++i) {
      const Vec& x = xs[i];
      double fv = f.value(x);
      Vec gr = f.gradient(x);
      double r = 0.0;
      for (int c = 0; c < d; ++c) r += coeff[c] * x[c] * x[c] * gr[c] * gr[c];
      lv[i] = fv * fv;
      rv[i] = r;
    }
    out.push_back(finish_mc(lv, rv, f, {"mc", st.mc_samples, 0, st.seed}, gates, 0.0));
  }
  return out;
}

std::vector<Verdict> simplex_suite(const SimplexSpec& spec, const std::vector<TestFunction>& fs,
                                   const EstimatorSettings& st) {
  const int n = spec.n;
  std::vector<Verdict> out;

  bool want_exact = spec.variant == SimplexVariant::Cor44 &&
                    (st.mode == "exact" || st.mode == "auto");
  if (st.mode == "exact" && spec.variant != SimplexVariant::Cor44)
    throw CapabilityError("only the eigenvalue-form variant has an exact estimator");

  if (want_exact) {
    bool all_poly = true;
    for (const auto& f : fs) all_poly = all_poly && f.is_polynomial();
    if (!all_poly && st.mode == "exact")
      throw CapabilityError("exact estimator requires polynomial test functions");
    if (all_poly) {
      Measure mu = Measure::regular_simplex(n);
      MultiIndex zero(n + 1, 0);
      for (const auto& f : fs) {
        auto ts = centered_terms(f);
        double lhs = pair_moment(mu, ts, ts, zero);
        KahanSum rhs;
        std::vector<std::vector<PolyTerm>> partials(n + 1);
        for (int i = 0; i <= n; ++i) partials[i] = poly_partial(ts, i);
        for (int i = 0; i <= n; ++i)
          for (int j = i + 1; j <= n; ++j) {
            auto eij = poly_diff(partials[i], partials[j]);
            MultiIndex extra(n + 1, 0);
            extra[i] = 1;
            extra[j] = 1;
            rhs.add(pair_moment(mu, eij, eij, extra));
          }
        Verdict v;
        v.estimator = {"exact", 0, 0, st.seed};
        v.lhs = lhs;
        v.rhs = rhs.value() / (n + 1);
        double s = f.centering_se();
        v.lhs_se = kExactRoundoff * std::fabs(v.lhs) + s * s;
        v.rhs_se = kExactRoundoff * std::fabs(v.rhs);
        v.status = classify_margin(v.lhs, v.lhs_se, v.rhs, v.rhs_se);
        out.push_back(std::move(v));
      }
      return out;
    }
  }

  bool needs_desing = spec.variant != SimplexVariant::Cor44;
  SimplexBatch batch = make_simplex_batch(Measure::regular_simplex(n), st, needs_desing);
  auto xs = materialize_rows(batch.pts);
  std::vector<double> lv(xs.size()), rv(xs.size());
  for (const auto& f : fs) {
    for (size_t i = 0; i < xs.size(); ++i) {
      const Vec& x = xs[i];
      double fv = f.value(x);
      Vec g = f.gradient(x);
      double r = 0.0;
      switch (spec.variant) {
        case SimplexVariant::Cor42: r = corner_form_value(x, g); break;
        case SimplexVariant::Thm43: r = pairwise_form_value(x, g); break;
        case SimplexVariant::Cor44: r = cpn_form_value(x, g, n); break;
      }
      lv[i] = fv * fv;
      rv[i] = r;
    }
    out.push_back(finish_mc(lv, rv, f, {"mc", st.mc_samples, 0, st.seed}, {},
                            batch.flagged_fraction));
  }
  return out;
}

std::vector<Verdict> thm45_suite(const Thm45Spec& spec, const std::vector<TestFunction>& fs,
                                 const EstimatorSettings& st) {
  Measure nu = Measure::weighted_simplex(spec.n, spec.phi, spec.q);
  auto gates = thm45_gates(spec, st);
  SimplexBatch batch = make_simplex_batch(nu, st, true);
  auto xs = materialize_rows(batch.pts);
  std::vector<Verdict> out;
  std::vector<double> lv(xs.size()), rv(xs.size());
  for (const auto& f : fs) {
    for (size_t i = 0; i < xs.size(); ++i) {
      const Vec& x = xs[i];
      double fv = f.value(x);
      Vec g = f.gradient(x);
      lv[i] = fv * fv;
      rv[i] = pairwise_form_value(x, g);
    }
    out.push_back(finish_mc(lv, rv, f, {"mc", st.mc_samples, 0, st.seed}, gates,
                            batch.flagged_fraction));
  }
  return out;
}

std::vector<Verdict> thm13_suite(const Thm13Spec& spec, const std::vector<TestFunction>& fs,
                                 const EstimatorSettings& st) {
  const int d = spec.mu.ambient_dimension();
  const double c = poincare_coeff(spec.k);
  auto moments =
      spec.mu.second_moments(CounterRng::derive_stream(kRoleMoments, st.seed), st.mc_samples);
  auto xs = materialize_rows(spec.mu.sample(st.seed, st.mc_samples));
  std::vector<Verdict> out;
  std::vector<double> lv(xs.size()), rv(xs.size());
  for (const auto& f : fs) {
    auto gates = thm13_gates(spec, f, st);
    bool drop_v = spec.unconditional_f;
    for (const auto& g : gates)
      if (g.name == "f_unconditional" && !g.pass) drop_v = false;
    Vec grad_sq_mean = Vec::Zero(d);
    for (size_t i = 0; i < xs.size(); ++i) {
      const Vec& x = xs[i];
      double fv = f.value(x);
      Vec gr = f.gradient(x);
      double r = 0.0;
      for (int a = 0; a < d; ++a) {
        double w = c * x[a] * x[a] + (drop_v ? 0.0 : moments.values[a]);
        r += w * gr[a] * gr[a];
        grad_sq_mean[a] += gr[a] * gr[a];
      }
      lv[i] = fv * fv;
      rv[i] = r;
    }
    grad_sq_mean /= static_cast<double>(xs.size());
    Verdict v = finish_mc(lv, rv, f, {"mc", st.mc_samples, 0, st.seed}, gates, 0.0);
    if (!drop_v) v.rhs_se += moments.std_errors.dot(grad_sq_mean);
    v.status = classify_margin(v.lhs, v.lhs_se, v.rhs, v.rhs_se);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Verdict> cor12_suite(const Cor12Spec& spec, const std::vector<TestFunction>& fs,
                                 const EstimatorSettings& st) {
  const int d = static_cast<int>(spec.box_lo.size());
  if (!(spec.ell > 1.0)) throw DomainError("cor12: ell > 1 required");
  auto gates = cor12_gates(spec, st);
  const double c = poincare_coeff(spec.ell);
  auto xs = materialize_rows(sample_cor12(spec, st.seed, st.mc_samples));
  std::vector<Verdict> out;
  std::vector<double> lv(xs.size()), rv(xs.size());
  for (const auto& f : fs) {
    for (size_t i = 0; i < xs.size(); ++i) {
      const Vec& x = xs[i];
      double fv = f.value(x);
      Vec gr = f.gradient(x);
      double r = 0.0;
      for (int a = 0; a < d; ++a) r += c * x[a] * x[a] * gr[a] * gr[a];
      lv[i] = fv * fv;
      rv[i] = r;
    }
    out.push_back(finish_mc(lv, rv, f, {"mc", st.mc_samples, 0, st.seed}, gates, 0.0));
  }
  return out;
}

std::vector<Verdict> prop36_suite(const Prop36Spec& spec, const std::vector<TestFunction>& fs,
                                  const EstimatorSettings& st) {
  const int n = spec.pot.dimension();
  const bool simplex_coords = spec.nu.is_regular_simplex() || spec.nu.is_weighted_simplex();
  auto xs = materialize_rows(spec.nu.sample(st.seed, st.mc_samples));

  std::vector<TransportContext> geo;
  geo.reserve(xs.size());
  for (const Vec& x : xs) {
    Vec y = simplex_coords ? Vec(x.tail(n)) : x;
    geo.emplace_back(spec.pot, y);
  }

  std::vector<Vec> probes;
  for (size_t i = 0; i < std::min<size_t>(100, xs.size()); ++i)
    probes.push_back(geo[i].preimage());
  auto star = star_condition_check(spec.pot, spec.phi_x, probes);
  GateResult star_gate;
  star_gate.name = "star_condition";
  star_gate.pass = star.pass;
  {
    std::ostringstream os;
    os << "min eigenvalue " << star.min_eigenvalue_overall << " over " << probes.size()
       << " probes";
    star_gate.detail = os.str();
  }

  std::vector<Verdict> out;
  std::vector<double> lv(xs.size()), rv(xs.size());
  for (const auto& f : fs) {
    for (size_t i = 0; i < xs.size(); ++i) {
      const Vec& x = xs[i];
      double fv = f.value(x);
      Vec U;
      if (simplex_coords) {
        Vec g = f.gradient(x);
        U = Vec(n);
        for (int a = 0; a < n; ++a) U[a] = g[a + 1] - g[0];
      } else {
        U = f.gradient(x);
      }
      lv[i] = fv * fv;
      rv[i] = geo[i].q_form(U);
    }
    out.push_back(finish_mc(lv, rv, f, {"mc", st.mc_samples, 0, st.seed}, {star_gate}, 0.0));
  }
  return out;
}

}  // namespace

std::vector<Verdict> evaluate_suite(const InequalitySpec& spec,
                                    const std::vector<TestFunction>& fs,
                                    const EstimatorSettings& st) {
  for (const auto& f : fs)
    if (f.dimension() != probe_dimension(spec))
      throw DomainError("test function dimension does not match the inequality variant");

  if (auto* s = std::get_if<Thm11Spec>(&spec)) {
    if (s->k < 2) throw DomainError("thm11: integer k >= 2 required");
    if (!s->mu.is_orthant_product())
      throw CapabilityError("thm11: orthant product measure required");
    std::vector<double> coeff(s->mu.ambient_dimension(), poincare_coeff(s->k));
    return orthant_suite(s->mu, coeff, fs, st, thm11_gates(*s, st));
  }
  if (auto* s = std::get_if<Thm61Spec>(&spec)) {
    if (static_cast<int>(s->k.size()) != s->mu.ambient_dimension())
      throw DomainError("thm61: one k_i per coordinate required");
    for (double k : s->k)
      if (!(k > 1.0)) throw DomainError("thm61: k_i > 1 required");
    if (!s->mu.is_orthant_product())
      throw CapabilityError("thm61: orthant product measure required");
    std::vector<double> coeff(s->k.size());
    for (size_t i = 0; i < s->k.size(); ++i) coeff[i] = poincare_coeff(s->k[i]);
    return orthant_suite(s->mu, coeff, fs, st, thm61_gates(*s, st));
  }
  if (auto* s = std::get_if<Cor12Spec>(&spec)) return cor12_suite(*s, fs, st);
  if (auto* s = std::get_if<Thm13Spec>(&spec)) return thm13_suite(*s, fs, st);
  if (auto* s = std::get_if<SimplexSpec>(&spec)) return simplex_suite(*s, fs, st);
  if (auto* s = std::get_if<Thm45Spec>(&spec)) return thm45_suite(*s, fs, st);
  return prop36_suite(std::get<Prop36Spec>(spec), fs, st);
}

Verdict evaluate(const InequalitySpec& spec, const TestFunction& f,
                 const EstimatorSettings& st) {
  return evaluate_suite(spec, {f}, st)[0];
}

Verdict evaluate_thm11(const Measure& mu, const TestFunction& f, int k,
                       const EstimatorSettings& st) {
  return evaluate(Thm11Spec{mu, k}, f, st);
}

Verdict evaluate_thm61(const Measure& mu, const TestFunction& f, const std::vector<double>& k,
                       const EstimatorSettings& st) {
  return evaluate(Thm61Spec{mu, k}, f, st);
}

Verdict evaluate_cor12(const Cor12Spec& set, const TestFunction& f,
                       const EstimatorSettings& st) {
  return evaluate(InequalitySpec(set), f, st);
}

Verdict evaluate_thm13(const Measure& mu, const TestFunction& f, int k, bool unconditional_f,
                       const EstimatorSettings& st) {
  return evaluate(Thm13Spec{mu, k, unconditional_f}, f, st);
}

Verdict evaluate_simplex(SimplexVariant variant, int n, const TestFunction& f,
                         const EstimatorSettings& st) {
  return evaluate(SimplexSpec{n, variant}, f, st);
}

Verdict evaluate_thm45(const ScalarField& phi, double q, int n, const TestFunction& f,
                       const EstimatorSettings& st) {
  return evaluate(Thm45Spec{n, phi, q}, f, st);
}

Verdict evaluate_prop36(const Prop36Spec& spec, const TestFunction& f,
                        const EstimatorSettings& st) {
  return evaluate(InequalitySpec(spec), f, st);
}

namespace {

// the measure a variant's probes are centered against; Cor12 has a set
// indicator instead and is handled separately
std::optional<Measure> centering_measure(const InequalitySpec& spec) {
  if (auto* s = std::get_if<Thm11Spec>(&spec)) return s->mu;
  if (auto* s = std::get_if<Thm61Spec>(&spec)) return s->mu;
  if (auto* s = std::get_if<Thm13Spec>(&spec)) return s->mu;
  if (auto* s = std::get_if<SimplexSpec>(&spec)) return Measure::regular_simplex(s->n);
  if (auto* s = std::get_if<Thm45Spec>(&spec))
    return Measure::weighted_simplex(s->n, s->phi, s->q);
  if (auto* s = std::get_if<Prop36Spec>(&spec)) return s->nu;
  return std::nullopt;
}

}  // namespace

TestFunction center_for(const InequalitySpec& spec, const TestFunction& f,
                        const EstimatorSettings& st) {
  std::uint64_t seed = CounterRng::derive_stream(kRoleCenter, st.seed);
  if (auto mu = centering_measure(spec)) return center(f, *mu, seed, st.mc_samples);
  const auto& s = std::get<Cor12Spec>(spec);
  auto xs = materialize_rows(sample_cor12(s, seed, st.mc_samples));
  std::vector<double> vals(xs.size());
  for (size_t r = 0; r < xs.size(); ++r) vals[r] = f.value(xs[r]);
  auto ms = mean_with_se(vals);
  return f.shifted(ms.mean, ms.se);
}

std::vector<TestFunction> make_centered_suite(const InequalitySpec& spec, int count, int degree,
                                              std::uint64_t seed,
                                              const EstimatorSettings& st) {
  const int dim = probe_dimension(spec);
  std::vector<TestFunction> raw;
  raw.reserve(count);
  for (int i = 0; i < count; ++i)
    raw.push_back(
        TestFunction::random_polynomial(dim, degree, CounterRng::derive_stream(seed, i)));

  std::uint64_t cseed = CounterRng::derive_stream(kRoleCenter, st.seed);
  auto mu = centering_measure(spec);
  std::vector<TestFunction> fs;
  fs.reserve(count);
  if (mu && mu->has_exact_moments()) {
    for (const auto& f : raw) fs.push_back(center(f, *mu, cseed, st.mc_samples));
    return fs;
  }
  // one Monte Carlo centering batch shared by the whole suite
  Mat pts = mu ? mu->sample(cseed, st.mc_samples)
               : sample_cor12(std::get<Cor12Spec>(spec), cseed, st.mc_samples);
  auto xs = materialize_rows(pts);
  std::vector<double> vals(xs.size());
  for (const auto& f : raw) {
    for (size_t r = 0; r < xs.size(); ++r) vals[r] = f.value(xs[r]);
    auto ms = mean_with_se(vals);
    fs.push_back(f.shifted(ms.mean, ms.se));
  }
  return fs;
}

SharpnessReport sharpness_probe(SimplexVariant variant, int n) {
  if (variant != SimplexVariant::Cor44)
    throw CapabilityError("sharpness probe is defined for the eigenvalue-form variant");
  TestFunction f = TestFunction::coordinate(n + 1, 1);
  Measure mu = Measure::regular_simplex(n);
  f = center(f, mu);
  EstimatorSettings st;
  st.mode = "exact";
  Verdict v = evaluate_simplex(SimplexVariant::Cor44, n, f, st);
  SharpnessReport rep;
  rep.n = n;
  rep.lhs = v.lhs;
  rep.rhs = v.rhs;
  rep.relative_gap = std::fabs(v.rhs - v.lhs) / std::fabs(v.lhs);
  return rep;
}

}  // namespace plab
