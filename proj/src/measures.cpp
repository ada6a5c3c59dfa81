#include "plab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "plab/errors.hpp"
#include "plab/quadrature.hpp"
#include "plab/rng.hpp"
#include "plab/stats.hpp"

namespace plab {

namespace {

constexpr long kChunk = 8192;
constexpr std::uint64_t kRoleSample = 0x5A17;
constexpr std::uint64_t kRoleEnvelope = 0xE57E;
constexpr std::uint64_t kRoleRejectLp = 0x4C9B;
constexpr std::uint64_t kRoleProbe = 0x960B;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

// Per-factor sampling table: cumulative mass on a u-grid through t = u/(1-u),
// inverted by monotone cubic interpolation. 2^14 intervals, tails clipped at
// relative mass 1e-12.
struct FactorTable {
  double table_mass = 0.0;  // trapezoid total, normalizes the table
  double mass = 0.0;        // Gauss-rule total, used for moments
  std::vector<double> t, F, slope;
  std::vector<double> q_nodes, q_dens;  // Gauss nodes and weight*density, cached

  void build(const OrthantFactor& f) {
    const int M = 1 << 14;
    t.resize(M);
    F.resize(M);
    std::vector<double> g(M);
    for (int j = 0; j < M; ++j) {
      double u = static_cast<double>(j) / M;
      double tj = u / (1.0 - u);
      double dens = std::exp(-f.exponent(tj)) / ((1.0 - u) * (1.0 - u));
      if (!std::isfinite(dens)) throw EvaluationError("orthant factor density overflowed");
      t[j] = tj;
      g[j] = dens;
    }
    F[0] = 0.0;
    const double du = 1.0 / M;
    for (int j = 1; j < M; ++j) F[j] = F[j - 1] + 0.5 * (g[j - 1] + g[j]) * du;
    table_mass = F[M - 1];
    if (!(table_mass > 0.0)) throw ModelViolation("orthant factor has zero mass");

    // Fritsch-Carlson slopes of t as a function of F
    slope.assign(M, 0.0);
    std::vector<double> d(M - 1), h(M - 1);
    for (int j = 0; j + 1 < M; ++j) {
      h[j] = F[j + 1] - F[j];
      d[j] = h[j] > 0 ? (t[j + 1] - t[j]) / h[j] : 0.0;
    }
    slope[0] = d[0];
    slope[M - 1] = d[M - 2];
    for (int j = 1; j + 1 < M; ++j) {
      if (d[j - 1] <= 0.0 || d[j] <= 0.0) {
        slope[j] = 0.0;
      } else {
        double w1 = 2.0 * h[j] + h[j - 1];
        double w2 = h[j] + 2.0 * h[j - 1];
        slope[j] = (w1 + w2) / (w1 / d[j - 1] + w2 / d[j]);
      }
    }

    auto rule = half_line_rule(2048);
    q_nodes = rule.nodes;
    q_dens.resize(rule.nodes.size());
    KahanSum s;
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      q_dens[k] = rule.weights[k] * std::exp(-f.exponent(rule.nodes[k]));
      s.add(q_dens[k]);
    }
    mass = s.value();
  }

  double quantile(double u01) const {
    const double lo = 1e-12, hi = 1.0 - 1e-12;
    double v = std::min(std::max(u01, lo), hi) * table_mass;
    auto it = std::upper_bound(F.begin(), F.end(), v);
    int j = static_cast<int>(it - F.begin()) - 1;
    j = std::max(0, std::min(j, static_cast<int>(F.size()) - 2));
    double hseg = F[j + 1] - F[j];
    if (hseg <= 0.0) return t[j];
    double s = (v - F[j]) / hseg;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * t[j] + (s3 - 2 * s2 + s) * hseg * slope[j] +
           (-2 * s3 + 3 * s2) * t[j + 1] + (s3 - s2) * hseg * slope[j + 1];
  }

  double moment(int power) const {
    KahanSum s;
    for (size_t k = 0; k < q_nodes.size(); ++k)
      s.add(q_dens[k] * std::pow(q_nodes[k], power));
    return s.value() / mass;
  }
};

struct Measure::OrthantProductSpec {
  std::vector<OrthantFactor> factors;
  std::vector<FactorTable> tables;
};

Measure Measure::regular_simplex(int n) {
  if (n < 1) throw DomainError("regular_simplex: n >= 1 required");
  return Measure(RegularSimplexSpec{n});
}

Measure Measure::corner_simplex(int n) {
  if (n < 1) throw DomainError("corner_simplex: n >= 1 required");
  return Measure(CornerSimplexSpec{n});
}

Measure Measure::lp_ball(int n, double p) {
  if (n < 1) throw DomainError("lp_ball: n >= 1 required");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("lp_ball: p must lie in (0,1)");
  return Measure(LpBallSpec{n, p});
}

Measure Measure::orthant_product(std::vector<OrthantFactor> factors) {
  if (factors.empty()) throw DomainError("orthant_product: needs at least one factor");
  auto spec = std::make_shared<OrthantProductSpec>();
  spec->factors = std::move(factors);
  spec->tables.resize(spec->factors.size());
  for (size_t i = 0; i < spec->factors.size(); ++i) spec->tables[i].build(spec->factors[i]);
  return Measure(spec);
}

Measure Measure::weighted_simplex(int n, ScalarField phi, double q) {
  if (n < 1) throw DomainError("weighted_simplex: n >= 1 required");
  if (!phi.valid()) throw DomainError("weighted_simplex: weight callable required");
  return Measure(WeightedSimplexSpec{n, std::move(phi), q});
}

Measure Measure::interval(double a, double b) {
  if (!(a < b)) throw DomainError("interval: a < b required");
  return Measure(IntervalSpec{a, b});
}

bool Measure::is_regular_simplex() const {
  return std::holds_alternative<RegularSimplexSpec>(spec_);
}
bool Measure::is_corner_simplex() const {
  return std::holds_alternative<CornerSimplexSpec>(spec_);
}
bool Measure::is_lp_ball() const { return std::holds_alternative<LpBallSpec>(spec_); }
bool Measure::is_orthant_product() const {
  return std::holds_alternative<std::shared_ptr<OrthantProductSpec>>(spec_);
}
bool Measure::is_weighted_simplex() const {
  return std::holds_alternative<WeightedSimplexSpec>(spec_);
}
bool Measure::is_interval() const { return std::holds_alternative<IntervalSpec>(spec_); }

int Measure::ambient_dimension() const {
  if (auto* s = std::get_if<RegularSimplexSpec>(&spec_)) return s->n + 1;
  if (auto* s = std::get_if<CornerSimplexSpec>(&spec_)) return s->n;
  if (auto* s = std::get_if<LpBallSpec>(&spec_)) return s->n;
  if (auto* s = std::get_if<std::shared_ptr<OrthantProductSpec>>(&spec_))
    return static_cast<int>((*s)->factors.size());
  if (auto* s = std::get_if<WeightedSimplexSpec>(&spec_)) return s->n + 1;
  auto& iv = std::get<IntervalSpec>(spec_);
  (void)iv;
  return 1;
}

int Measure::simplex_n() const {
  if (auto* s = std::get_if<RegularSimplexSpec>(&spec_)) return s->n;
  if (auto* s = std::get_if<CornerSimplexSpec>(&spec_)) return s->n;
  if (auto* s = std::get_if<WeightedSimplexSpec>(&spec_)) return s->n;
  throw CapabilityError("measure is not a simplex family");
}

double Measure::lp_p() const { return std::get<LpBallSpec>(spec_).p; }

const std::vector<OrthantFactor>& Measure::factors() const {
  return std::get<std::shared_ptr<OrthantProductSpec>>(spec_)->factors;
}

const ScalarField& Measure::weight() const {
  return std::get<WeightedSimplexSpec>(spec_).phi;
}

double Measure::weight_degree() const { return std::get<WeightedSimplexSpec>(spec_).q; }

std::pair<double, double> Measure::interval_bounds() const {
  auto& s = std::get<IntervalSpec>(spec_);
  return {s.a, s.b};
}

std::string Measure::descriptor() const {
  std::ostringstream os;
  if (auto* s = std::get_if<RegularSimplexSpec>(&spec_)) {
    os << "regular_simplex(n=" << s->n << ")";
  } else if (auto* s = std::get_if<CornerSimplexSpec>(&spec_)) {
    os << "corner_simplex(n=" << s->n << ")";
  } else if (auto* s = std::get_if<LpBallSpec>(&spec_)) {
    os << "lp_ball(n=" << s->n << ",p=" << fmt(s->p) << ")";
  } else if (auto* s = std::get_if<std::shared_ptr<OrthantProductSpec>>(&spec_)) {
    os << "orthant_product(";
    for (size_t i = 0; i < (*s)->factors.size(); ++i)
      os << (i ? "," : "") << (*s)->factors[i].name;
    os << ")";
  } else if (auto* s = std::get_if<WeightedSimplexSpec>(&spec_)) {
    os << "weighted_simplex(n=" << s->n << ",phi=" << s->phi.name() << ",q=" << fmt(s->q)
       << ")";
  } else {
    auto& iv = std::get<IntervalSpec>(spec_);
    os << "interval(" << fmt(iv.a) << "," << fmt(iv.b) << ")";
  }
  return os.str();
}

namespace {

void sample_regular_simplex_chunk(int n, CounterRng& rng, Mat& out, long row0, long rows) {
  for (long r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      double e = rng.exponential();
      out(row0 + r, i) = e;
      s += e;
    }
    for (int i = 0; i <= n; ++i) out(row0 + r, i) /= s;
  }
}

}  // namespace

Mat Measure::sample(std::uint64_t seed, long count) const {
  if (count < 1) throw DomainError("sample: count >= 1 required");
  const int d = ambient_dimension();
  Mat out(count, d);

  auto for_chunks = [&](auto&& body) {
    long done = 0;
    std::uint64_t chunk = 0;
    while (done < count) {
      long rows = std::min(kChunk, count - done);
      CounterRng rng(seed, CounterRng::derive_stream(kRoleSample, chunk));
      body(rng, done, rows);
      done += rows;
      ++chunk;
    }
  };

  if (auto* s = std::get_if<RegularSimplexSpec>(&spec_)) {
    int n = s->n;
    for_chunks([&](CounterRng& rng, long row0, long rows) {
      sample_regular_simplex_chunk(n, rng, out, row0, rows);
    });
  } else if (auto* s = std::get_if<CornerSimplexSpec>(&spec_)) {
    // the regular-simplex stream with coordinate 0 dropped
    int n = s->n;
    Mat full(count, n + 1);
    for_chunks([&](CounterRng& rng, long row0, long rows) {
      sample_regular_simplex_chunk(n, rng, full, row0, rows);
    });
    out = full.rightCols(n);
  } else if (auto* s = std::get_if<LpBallSpec>(&spec_)) {
    const int n = s->n;
    const double p = s->p;
    const double shape = 1.0 / p;
    for_chunks([&](CounterRng& rng, long row0, long rows) {
      std::vector<double> g(n);
      for (long r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          g[i] = rng.gamma(shape);  // |g_i|^p
          sum += g[i];
        }
        std::uint64_t signs = rng.next_u64();
        double z = rng.exponential();
        double denom = sum + z;
        for (int i = 0; i < n; ++i) {
          double mag = std::pow(g[i] / denom, shape);
          out(row0 + r, i) = ((signs >> i) & 1) ? mag : -mag;
        }
      }
    });
  } else if (auto* s = std::get_if<std::shared_ptr<OrthantProductSpec>>(&spec_)) {
    const auto& spec = **s;
    for_chunks([&](CounterRng& rng, long row0, long rows) {
      for (long r = 0; r < rows; ++r)
        for (int i = 0; i < d; ++i)
          out(row0 + r, i) = spec.tables[i].quantile(rng.uniform01());
    });
  } else if (auto* s = std::get_if<WeightedSimplexSpec>(&spec_)) {
    const int n = s->n;
    const ScalarField& phi = s->phi;
    // envelope from a probe pass, certified during rejection
    CounterRng env_rng(seed, CounterRng::derive_stream(kRoleEnvelope, 0));
    Mat probes(10000, n + 1);
    sample_regular_simplex_chunk(n, env_rng, probes, 0, 10000);
    double peak = 0.0;
    for (int r = 0; r < probes.rows(); ++r)
      peak = std::max(peak, std::exp(-phi.value(probes.row(r).transpose())));
    double envelope = 1.1 * peak;
    if (!(envelope > 0.0)) throw ModelViolation("weighted simplex: zero envelope");

    for (int attempt = 0; attempt < 32; ++attempt) {
      bool violated = false;
      double worst = 0.0;
      long proposals = 0, accepted_total = 0;
      long done = 0;
      std::uint64_t chunk = 0;
      while (done < count && !violated) {
        long quota = std::min(kChunk, count - done);
        CounterRng rng(seed, CounterRng::derive_stream(kRoleSample, chunk));
        long got = 0;
        Vec x(n + 1);
        while (got < quota) {
          double sum = 0.0;
          for (int i = 0; i <= n; ++i) {
            x[i] = rng.exponential();
            sum += x[i];
          }
          x /= sum;
          double dens = std::exp(-phi.value(x));
          ++proposals;
          if (dens > envelope) {
            violated = true;
            worst = dens;
            break;
          }
          if (rng.uniform01() * envelope < dens) {
            out.row(done + got) = x.transpose();
            ++got;
            ++accepted_total;
          }
          if (proposals >= 200000 &&
              static_cast<double>(accepted_total) / proposals < 1e-4) {
            std::ostringstream msg;
            msg << "weighted simplex rejection acceptance collapsed: envelope=" << envelope
                << " acceptance=" << static_cast<double>(accepted_total) / proposals;
            throw ConvergenceError(msg.str());
          }
        }
        done += got;
        ++chunk;
      }
      if (!violated) return out;
      envelope = std::max(envelope * 1.5, 1.1 * worst);
    }
    throw ConvergenceError("weighted simplex: envelope kept inflating");
  } else {
    auto& iv = std::get<IntervalSpec>(spec_);
    for_chunks([&](CounterRng& rng, long row0, long rows) {
      for (long r = 0; r < rows; ++r) out(row0 + r, 0) = rng.uniform(iv.a, iv.b);
    });
  }
  return out;
}

bool Measure::has_exact_moments() const {
  return is_regular_simplex() || is_corner_simplex() || is_interval() || is_orthant_product();
}

double Measure::exact_polynomial_moment(const MultiIndex& a) const {
  const int d = ambient_dimension();
  if (static_cast<int>(a.size()) != d)
    throw DomainError("exact_polynomial_moment: multi-index dimension mismatch");
  for (int ai : a)
    if (ai < 0) throw DomainError("exact_polynomial_moment: negative exponent");

  if (is_regular_simplex() || is_corner_simplex()) {
    // Dirichlet(1,...,1): E prod x^a = n! prod a_i! / (n + |a|)!
    int n = simplex_n();
    long total = 0;
    double num = 1.0;
    for (int ai : a) {
      for (int k = 2; k <= ai; ++k) num *= k;
      total += ai;
    }
    double den = 1.0;
    for (long j = 1; j <= total; ++j) den *= (n + j);
    return num / den;
  }
  if (is_interval()) {
    auto [lo, hi] = interval_bounds();
    int k = a[0];
    return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
  }
  if (is_orthant_product()) {
    double m = 1.0;
    for (int i = 0; i < d; ++i) m *= factor_moment(i, a[i]);
    return m;
  }
  throw CapabilityError("measure has no exact moment oracle: " + descriptor());
}

SecondMoments Measure::second_moments(std::uint64_t seed, long mc_samples) const {
  const int d = ambient_dimension();
  SecondMoments sm;
  if (has_exact_moments()) {
    sm.exact = true;
    sm.values = Vec(d);
    sm.std_errors = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
      MultiIndex a(d, 0);
      a[i] = 2;
      sm.values[i] = exact_polynomial_moment(a);
    }
    return sm;
  }
  Mat pts = sample(seed, mc_samples);
  sm.exact = false;
  sm.values = Vec(d);
  sm.std_errors = Vec(d);
  for (int i = 0; i < d; ++i) {
    std::vector<double> sq(pts.rows());
    for (long r = 0; r < pts.rows(); ++r) sq[r] = pts(r, i) * pts(r, i);
    auto ms = mean_with_se(sq);
    sm.values[i] = ms.mean;
    sm.std_errors[i] = ms.se;
  }
  return sm;
}

double Measure::factor_mass(int i) const {
  const auto& spec = *std::get<std::shared_ptr<OrthantProductSpec>>(spec_);
  return spec.tables.at(i).mass;
}

double Measure::factor_moment(int i, int power) const {
  const auto& spec = *std::get<std::shared_ptr<OrthantProductSpec>>(spec_);
  return spec.tables.at(i).moment(power);
}

Mat rejection_sample_lp(int n, double p, std::uint64_t seed, long count,
                        RejectionStats* stats) {
  if (n > 4) throw DomainError("rejection_sample_lp: n <= 4 required");
  if (n < 1 || !(p > 0.0 && p < 1.0001))
    throw DomainError("rejection_sample_lp: invalid parameters");
  Mat out(count, n);
  RejectionStats local;
  long done = 0;
  std::uint64_t chunk = 0;
  Vec x(n);
  while (done < count) {
    long quota = std::min(kChunk, count - done);
    CounterRng rng(seed, CounterRng::derive_stream(kRoleRejectLp, chunk));
    long got = 0;
    while (got < quota) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] = rng.uniform(-1.0, 1.0);
        s += std::pow(std::fabs(x[i]), p);
      }
      ++local.proposals;
      if (s <= 1.0) {
        out.row(done + got) = x.transpose();
        ++got;
        ++local.accepted;
      }
    }
    done += got;
    ++chunk;
  }
  if (stats) *stats = local;
  return out;
}

double lp_ball_volume(int n, double p) {
  return std::pow(2.0 * std::tgamma(1.0 / p + 1.0), n) / std::tgamma(n / p + 1.0);
}

ProbeReport power_convexity_probe(const std::function<double(const Vec&)>& phi, int n,
                                  const std::vector<double>& exponents, std::uint64_t seed,
                                  int trials) {
  if (static_cast<int>(exponents.size()) != n)
    throw DomainError("power_convexity_probe: exponent count mismatch");
  ProbeReport rep;
  rep.trials = trials;
  CounterRng rng(seed, CounterRng::derive_stream(kRoleProbe, 0));
  auto g = [&](const Vec& x) {
    Vec y(n);
    for (int i = 0; i < n; ++i) y[i] = std::pow(x[i], exponents[i]);
    return phi(y);
  };
  Vec u(n), v(n), m(n);
  for (int t = 0; t < trials; ++t) {
    for (int i = 0; i < n; ++i) {
      u[i] = std::exp(rng.uniform(-2.0, 2.0));
      v[i] = std::exp(rng.uniform(-2.0, 2.0));
      m[i] = 0.5 * (u[i] + v[i]);
    }
    double gu = g(u), gv = g(v), gm = g(m);
    double scale = std::max({1.0, std::fabs(gu), std::fabs(gv)});
    double gap = gm - 0.5 * (gu + gv);
    if (gap > 1e-9 * scale) {
      ++rep.violations;
      rep.worst = std::max(rep.worst, gap);
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

ProbeReport p_convexity_probe(const std::function<double(const Vec&)>& phi, int n, double p,
                              std::uint64_t seed, int trials) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p_convexity_probe: p must lie in (0,1]");
  return power_convexity_probe(phi, n, std::vector<double>(n, 1.0 / p), seed, trials);
}

ProbeReport set_p_convexity_probe(const std::function<bool(const Vec&)>& contains,
                                  const Vec& box_lo, const Vec& box_hi, double p,
                                  std::uint64_t seed, int trials) {
  const int n = static_cast<int>(box_lo.size());
  ProbeReport rep;
  rep.trials = trials;
  CounterRng rng(seed, CounterRng::derive_stream(kRoleProbe, 1));
  auto draw_inside = [&](Vec& x) {
    for (long guard = 0; guard < 1000000; ++guard) {
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(std::max(0.0, box_lo[i]), box_hi[i]);
      if (contains(x)) return;
    }
    throw ConvergenceError("set probe: could not hit the set from its bounding box");
  };
  Vec u(n), v(n), m(n);
  for (int t = 0; t < trials; ++t) {
    draw_inside(u);
    draw_inside(v);
    for (int i = 0; i < n; ++i)
      m[i] = std::pow(0.5 * (std::pow(u[i], p) + std::pow(v[i], p)), 1.0 / p);
    if (!contains(m)) {
      ++rep.violations;
      rep.worst = 1.0;
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

HomogeneityReport homogeneity_check(const ScalarField& phi, int n, double q,
                                    std::uint64_t seed, int trials) {
  if (q < 0.0) throw DomainError("homogeneity_check: q >= 0 required");
  HomogeneityReport rep;
  CounterRng rng(seed, CounterRng::derive_stream(kRoleProbe, 2));
  Vec x(n + 1);
  double worst = 0.0, sup = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      x[i] = rng.exponential();
      s += x[i];
    }
    x /= s;
    double val = phi.value(x);
    sup = std::max(sup, val);
    double lam = rng.uniform(0.5, 2.0);
    double scaled = phi.value(lam * x);
    double expect = std::pow(lam, q) * val;
    double rel = std::fabs(scaled - expect) / std::max(1.0, std::fabs(expect));
    worst = std::max(worst, rel);
  }
  rep.worst_rel = worst;
  rep.homogeneous = worst <= 1e-8;
  rep.sup_on_simplex = sup;
  rep.gate_value = sup * q;
  rep.gate_pass = rep.gate_value <= static_cast<double>(n);
  return rep;
}

QuadratureGrid quadrature_grid(const Measure& m, int nodes_per_dim) {
  if (!m.is_orthant_product())
    throw CapabilityError("quadrature_grid: orthant product measure required");
  const int d = m.ambient_dimension();
  double total = std::pow(static_cast<double>(nodes_per_dim), d);
  if (total > 1e7) throw DomainError("quadrature_grid: node count exceeds 1e7");
  auto rule = half_line_rule(nodes_per_dim);
  const auto& factors = m.factors();

  std::vector<std::vector<double>> w1(d);
  for (int i = 0; i < d; ++i) {
    w1[i].resize(nodes_per_dim);
    for (int k = 0; k < nodes_per_dim; ++k)
      w1[i][k] = rule.weights[k] * std::exp(-factors[i].exponent(rule.nodes[k]));
  }

  long count = 1;
  for (int i = 0; i < d; ++i) count *= nodes_per_dim;
  QuadratureGrid grid;
  grid.nodes = Mat(count, d);
  grid.weights = Vec(count);
  std::vector<int> idx(d, 0);
  for (long r = 0; r < count; ++r) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      grid.nodes(r, i) = rule.nodes[idx[i]];
      w *= w1[i][idx[i]];
    }
    grid.weights[r] = w;
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < nodes_per_dim) break;
      idx[i] = 0;
    }
  }
  KahanSum s;
  for (long r = 0; r < count; ++r) s.add(grid.weights[r]);
  grid.total_mass = s.value();
  return grid;
}

void write_samples_csv(std::ostream& os, const Measure& measure, std::uint64_t seed,
                       const Mat& points, const std::string& version) {
  os << "# measure: " << measure.descriptor() << "\n";
  os << "# seed: " << seed << "\n";
  os << "# version: " << version << "\n";
  for (int i = 0; i < points.cols(); ++i) os << (i ? "," : "") << "x" << (i + 1);
  os << "\n";
  char buf[64];
  for (long r = 0; r < points.rows(); ++r) {
    for (int i = 0; i < points.cols(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", points(r, i));
      os << (i ? "," : "") << buf;
    }
    os << "\n";
  }
}

}  // namespace plab
