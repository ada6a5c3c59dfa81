#include "plab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "plab/errors.hpp"

namespace plab {

namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& where, const std::set<std::string>& required,
                 const std::set<std::string>& optional = {}) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!required.count(it.key()) && !optional.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
  for (const auto& k : required)
    if (!j.contains(k)) throw ConfigError(where + ": missing required key '" + k + "'");
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

double get_num(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::uint64_t get_seed(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !j.is_number_integer())
    throw ConfigError(where + ": expected an integer seed");
  return j.get<std::uint64_t>();
}

void check_schema_version(const json& j) {
  expect_keys(j, "config", {"schema_version"}, {"inequality", "suite", "estimator", "explore",
                                                "output", "base", "grid", "measure", "count",
                                                "seed", "variant", "dims"});
  if (get_int(j.at("schema_version"), "schema_version") != 1)
    throw ConfigError("unsupported schema_version (expected 1)");
}

OrthantFactor parse_factor(const json& j) {
  expect_keys(j, "factor", {"form"}, {"power", "scale"});
  std::string form = j.at("form").get<std::string>();
  double scale = j.contains("scale") ? get_num(j.at("scale"), "factor.scale") : 1.0;
  if (scale <= 0.0) throw ConfigError("factor.scale must be positive");
  OrthantFactor f;
  if (form == "sqrt") {
    f.exponent = [scale](double t) { return scale * std::sqrt(t); };
    f.name = "sqrt";
  } else if (form == "linear") {
    f.exponent = [scale](double t) { return scale * t; };
    f.name = "linear";
  } else if (form == "pow") {
    if (!j.contains("power")) throw ConfigError("factor form 'pow' requires 'power'");
    double p = get_num(j.at("power"), "factor.power");
    if (!(p > 0.0)) throw ConfigError("factor.power must be positive");
    f.exponent = [scale, p](double t) { return scale * std::pow(t, p); };
    f.name = "pow";
  } else {
    throw ConfigError("unknown factor form '" + form + "'");
  }
  return f;
}

// Weight on the closed simplex in R^{n+1}: named homogeneous families.
std::pair<ScalarField, double> parse_simplex_weight(const json& j) {
  expect_keys(j, "weight", {"form"}, {"scale", "alpha", "value"});
  std::string form = j.at("form").get<std::string>();
  double scale = j.contains("scale") ? get_num(j.at("scale"), "weight.scale") : 1.0;
  if (form == "const") {
    double v = j.contains("value") ? get_num(j.at("value"), "weight.value") : 0.0;
    return {ScalarField::constant(v), 0.0};
  }
  if (form == "sum_sqrt") {
    auto value = [scale](const Vec& x) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::sqrt(std::max(0.0, x[i]));
      return scale * s;
    };
    return {ScalarField(value, "sum_sqrt"), 0.5};
  }
  if (form == "sum_pow") {
    if (!j.contains("alpha")) throw ConfigError("weight form 'sum_pow' requires 'alpha'");
    double a = get_num(j.at("alpha"), "weight.alpha");
    if (!(a > 0.0)) throw ConfigError("weight.alpha must be positive");
    auto value = [scale, a](const Vec& x) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::pow(std::max(0.0, x[i]), a);
      return scale * s;
    };
    return {ScalarField(value, "sum_pow"), a};
  }
  throw ConfigError("unknown weight form '" + form + "'");
}

}  // namespace

Measure parse_measure(const json& j) {
  expect_keys(j, "measure", {"type"}, {"n", "p", "a", "b", "factors", "weight", "q"});
  std::string type = j.at("type").get<std::string>();
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key))
      throw ConfigError(std::string("measure '") + type + "' requires '" + key + "'");
    return j.at(key);
  };
  if (type == "regular_simplex") return Measure::regular_simplex(get_int(need("n"), "measure.n"));
  if (type == "corner_simplex") return Measure::corner_simplex(get_int(need("n"), "measure.n"));
  if (type == "lp_ball")
    return Measure::lp_ball(get_int(need("n"), "measure.n"), get_num(need("p"), "measure.p"));
  if (type == "interval")
    return Measure::interval(get_num(need("a"), "measure.a"), get_num(need("b"), "measure.b"));
  if (type == "orthant_product") {
    const json& fs = need("factors");
    if (!fs.is_array() || fs.empty()) throw ConfigError("measure.factors: non-empty array expected");
    std::vector<OrthantFactor> factors;
    for (const auto& f : fs) factors.push_back(parse_factor(f));
    return Measure::orthant_product(std::move(factors));
  }
  if (type == "weighted_simplex") {
    auto [phi, q_default] = parse_simplex_weight(need("weight"));
    double q = j.contains("q") ? get_num(j.at("q"), "measure.q") : q_default;
    return Measure::weighted_simplex(get_int(need("n"), "measure.n"), phi, q);
  }
  throw ConfigError("unknown measure type '" + type + "'");
}

namespace {

InequalitySpec parse_prop36(const json& j) {
  expect_keys(j, "inequality", {"variant", "potential", "n", "weight"}, {});
  std::string pot_name = j.at("potential").get<std::string>();
  int n = get_int(j.at("n"), "inequality.n");
  const json& w = j.at("weight");
  expect_keys(w, "weight", {"form"}, {"alpha", "scale", "value"});
  std::string form = w.at("form").get<std::string>();

  if (pot_name == "simplex") {
    Potential pot = Potential::simplex(n);
    if (form == "const") {
      double v = w.contains("value") ? get_num(w.at("value"), "weight.value") : 0.0;
      return Prop36Spec{pot, ScalarField::constant(v), Measure::regular_simplex(n)};
    }
    if (form == "sum_pow" || form == "sum_sqrt") {
      double alpha = form == "sum_sqrt" ? 0.5 : get_num(w.at("alpha"), "weight.alpha");
      double scale = w.contains("scale") ? get_num(w.at("scale"), "weight.scale") : 1.0;
      if (!(alpha > 0.0) || !(scale > 0.0))
        throw ConfigError("prop36 weight needs positive alpha and scale");
      // K-side weight c * sum y_i^alpha, pulled back through the moment map
      auto k_value = [alpha, scale](const Vec& y) {
        double s = 0.0;
        for (int i = 0; i < y.size(); ++i) s += std::pow(std::max(0.0, y[i]), alpha);
        return scale * s;
      };
      ScalarField w_on_K(k_value, "sum_pow");
      ScalarField phi_x = pullback_weight(pot, w_on_K);
      // the same weight as a function of the Delta coordinates (drop x_0)
      auto delta_value = [alpha, scale](const Vec& x) {
        double s = 0.0;
        for (int i = 1; i < x.size(); ++i) s += std::pow(std::max(0.0, x[i]), alpha);
        return scale * s;
      };
      Measure nu = Measure::weighted_simplex(n, ScalarField(delta_value, "sum_pow_k"), alpha);
      return Prop36Spec{pot, phi_x, nu};
    }
    throw ConfigError("prop36 simplex potential: weight form must be const/sum_sqrt/sum_pow");
  }
  if (pot_name == "exponential") {
    Potential pot = Potential::exponential(n);
    if (form != "sum_pow" && form != "sum_sqrt")
      throw ConfigError("prop36 exponential potential requires an integrable sum_pow weight");
    double alpha = form == "sum_sqrt" ? 0.5 : get_num(w.at("alpha"), "weight.alpha");
    double scale = w.contains("scale") ? get_num(w.at("scale"), "weight.scale") : 1.0;
    if (!(alpha > 0.0) || !(scale > 0.0))
      throw ConfigError("prop36 weight needs positive alpha and scale");
    // x-chart weight: c * sum exp(alpha x_i), with closed-form derivatives
    auto value = [alpha, scale](const Vec& x) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::exp(alpha * x[i]);
      return scale * s;
    };
    auto gradient = [alpha, scale](const Vec& x) {
      Vec g(x.size());
      for (int i = 0; i < x.size(); ++i) g[i] = scale * alpha * std::exp(alpha * x[i]);
      return g;
    };
    auto hessian = [alpha, scale](const Vec& x) {
      Mat h = Mat::Zero(x.size(), x.size());
      for (int i = 0; i < x.size(); ++i)
        h(i, i) = scale * alpha * alpha * std::exp(alpha * x[i]);
      return h;
    };
    ScalarField phi_x(value, gradient, hessian, "sum_exp_pow");
    std::vector<OrthantFactor> factors;
    for (int i = 0; i < n; ++i) {
      OrthantFactor f;
      f.exponent = [alpha, scale](double t) { return scale * std::pow(t, alpha); };
      f.name = "pow";
      factors.push_back(f);
    }
    return Prop36Spec{pot, phi_x, Measure::orthant_product(std::move(factors))};
  }
  throw ConfigError("unknown potential '" + pot_name + "'");
}

}  // namespace

InequalitySpec parse_inequality(const json& j) {
  if (!j.is_object() || !j.contains("variant"))
    throw ConfigError("inequality: object with 'variant' expected");
  std::string variant = j.at("variant").get<std::string>();

  if (variant == "Thm11") {
    expect_keys(j, "inequality", {"variant", "measure", "k"}, {});
    return Thm11Spec{parse_measure(j.at("measure")), get_int(j.at("k"), "inequality.k")};
  }
  if (variant == "Thm61") {
    expect_keys(j, "inequality", {"variant", "measure", "k"}, {});
    const json& ks = j.at("k");
    if (!ks.is_array()) throw ConfigError("thm61: k must be an array");
    std::vector<double> k;
    for (const auto& v : ks) k.push_back(get_num(v, "inequality.k[]"));
    return Thm61Spec{parse_measure(j.at("measure")), std::move(k)};
  }
  if (variant == "Cor12") {
    expect_keys(j, "inequality", {"variant", "set", "n", "ell"}, {"p"});
    std::string set = j.at("set").get<std::string>();
    int n = get_int(j.at("n"), "inequality.n");
    double ell = get_num(j.at("ell"), "inequality.ell");
    Cor12Spec spec;
    spec.ell = ell;
    spec.box_lo = Vec::Zero(n);
    spec.box_hi = Vec::Ones(n);
    if (set == "corner_simplex") {
      spec.contains = [](const Vec& x) {
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          if (x[i] < 0.0) return false;
          s += x[i];
        }
        return s <= 1.0;
      };
    } else if (set == "cube") {
      spec.contains = [](const Vec& x) {
        for (int i = 0; i < x.size(); ++i)
          if (x[i] < 0.0 || x[i] > 1.0) return false;
        return true;
      };
    } else if (set == "lp_orthant") {
      if (!j.contains("p")) throw ConfigError("cor12 set 'lp_orthant' requires 'p'");
      double p = get_num(j.at("p"), "inequality.p");
      spec.contains = [p](const Vec& x) {
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          if (x[i] < 0.0) return false;
          s += std::pow(x[i], p);
        }
        return s <= 1.0;
      };
    } else {
      throw ConfigError("unknown cor12 set '" + set + "'");
    }
    return spec;
  }
  if (variant == "Thm13") {
    expect_keys(j, "inequality", {"variant", "measure", "k"}, {"unconditional_f"});
    bool uncond = j.contains("unconditional_f") && j.at("unconditional_f").get<bool>();
    return Thm13Spec{parse_measure(j.at("measure")), get_int(j.at("k"), "inequality.k"), uncond};
  }
  if (variant == "Cor42" || variant == "Thm43" || variant == "Cor44") {
    expect_keys(j, "inequality", {"variant", "n"}, {});
    SimplexVariant v = variant == "Cor42" ? SimplexVariant::Cor42
                       : variant == "Thm43" ? SimplexVariant::Thm43 : SimplexVariant::Cor44;
    return SimplexSpec{get_int(j.at("n"), "inequality.n"), v};
  }
  if (variant == "Thm45") {
    expect_keys(j, "inequality", {"variant", "n", "weight"}, {"q"});
    auto [phi, q_default] = parse_simplex_weight(j.at("weight"));
    double q = j.contains("q") ? get_num(j.at("q"), "inequality.q") : q_default;
    return Thm45Spec{get_int(j.at("n"), "inequality.n"), phi, q};
  }
  if (variant == "Prop36") return parse_prop36(j);
  throw ConfigError("unknown inequality variant '" + variant + "'");
}

namespace {

SuiteConfig parse_suite(const json& j) {
  expect_keys(j, "suite", {}, {"function", "count", "degree", "seed"});
  SuiteConfig s;
  if (j.contains("function")) {
    s.function = j.at("function").get<std::string>();
    if (s.function != "polynomials" && s.function != "thin_shell")
      throw ConfigError("suite.function must be 'polynomials' or 'thin_shell'");
  }
  if (j.contains("count")) s.count = get_int(j.at("count"), "suite.count");
  if (j.contains("degree")) s.degree = get_int(j.at("degree"), "suite.degree");
  if (j.contains("seed")) s.seed = get_seed(j.at("seed"), "suite.seed");
  if (s.count < 1) throw ConfigError("suite.count must be >= 1");
  if (s.degree < 0 || s.degree > 6) throw ConfigError("suite.degree must be in 0..6");
  return s;
}

EstimatorSettings parse_estimator(const json& j) {
  expect_keys(j, "estimator", {}, {"mode", "samples", "nodes", "seed"});
  EstimatorSettings e;
  if (j.contains("mode")) {
    e.mode = j.at("mode").get<std::string>();
    if (e.mode != "auto" && e.mode != "exact" && e.mode != "quadrature" && e.mode != "mc")
      throw ConfigError("estimator.mode must be auto/exact/quadrature/mc");
  }
  if (j.contains("samples")) {
    e.mc_samples = j.at("samples").get<long>();
    if (e.mc_samples < 16) throw ConfigError("estimator.samples must be >= 16");
  }
  if (j.contains("nodes")) {
    e.quad_nodes = get_int(j.at("nodes"), "estimator.nodes");
    if (e.quad_nodes < 8) throw ConfigError("estimator.nodes must be >= 8");
  }
  if (j.contains("seed")) e.seed = get_seed(j.at("seed"), "estimator.seed");
  return e;
}

OutputConfig parse_output(const json& j, const std::string& default_csv) {
  OutputConfig o;
  o.csv = default_csv;
  if (j.is_null()) return o;
  expect_keys(j, "output", {}, {"report_json", "csv"});
  if (j.contains("report_json")) o.report_json = j.at("report_json").get<std::string>();
  if (j.contains("csv")) o.csv = j.at("csv").get<std::string>();
  return o;
}

}  // namespace

VerifyConfig parse_verify_config(const json& j) {
  check_schema_version(j);
  expect_keys(j, "config", {"schema_version", "inequality"},
              {"suite", "estimator", "explore", "output"});
  VerifyConfig c;
  c.inequality = parse_inequality(j.at("inequality"));
  if (j.contains("suite")) c.suite = parse_suite(j.at("suite"));
  if (j.contains("estimator")) c.estimator = parse_estimator(j.at("estimator"));
  if (j.contains("explore")) c.explore = j.at("explore").get<bool>();
  c.output = parse_output(j.contains("output") ? j.at("output") : json(), "verdicts.csv");
  c.echo = j;
  return c;
}

SweepConfig parse_sweep_config(const json& j) {
  check_schema_version(j);
  expect_keys(j, "config", {"schema_version", "base", "grid"}, {"explore", "output"});
  SweepConfig c;
  c.base = j.at("base");
  {
    // the base must itself be a valid verify body
    json probe = c.base;
    probe["schema_version"] = 1;
    parse_verify_config(probe);
  }
  const json& grid = j.at("grid");
  if (!grid.is_array() || grid.empty()) throw ConfigError("sweep.grid: non-empty array required");
  for (const auto& axis : grid) {
    expect_keys(axis, "grid axis", {"param", "values"}, {});
    SweepAxis a;
    a.param = axis.at("param").get<std::string>();
    if (a.param != "n" && a.param != "p" && a.param != "k" && a.param != "degree" &&
        a.param != "count")
      throw ConfigError("sweep axis param must be one of n/p/k/degree/count");
    const json& vals = axis.at("values");
    if (!vals.is_array() || vals.empty())
      throw ConfigError("sweep axis values: non-empty array required");
    for (const auto& v : vals) a.values.push_back(v);
    c.axes.push_back(std::move(a));
  }
  if (j.contains("explore")) c.explore = j.at("explore").get<bool>();
  c.output = parse_output(j.contains("output") ? j.at("output") : json(), "sweep.csv");
  c.echo = j;
  return c;
}

SampleConfig parse_sample_config(const json& j) {
  check_schema_version(j);
  expect_keys(j, "config", {"schema_version", "measure", "count"}, {"seed", "output"});
  SampleConfig c{json(), parse_measure(j.at("measure")), 0, 1, {}};
  c.count = j.at("count").get<long>();
  if (c.count < 1) throw ConfigError("sample.count must be >= 1");
  if (j.contains("seed")) c.seed = get_seed(j.at("seed"), "seed");
  c.output = parse_output(j.contains("output") ? j.at("output") : json(), "samples.csv");
  c.echo = j;
  return c;
}

SharpnessConfig parse_sharpness_config(const json& j) {
  check_schema_version(j);
  expect_keys(j, "config", {"schema_version", "variant", "dims"}, {"output"});
  if (j.at("variant").get<std::string>() != "Cor44")
    throw ConfigError("sharpness: only the Cor44 equality case is defined");
  SharpnessConfig c;
  const json& dims = j.at("dims");
  if (!dims.is_array() || dims.empty()) throw ConfigError("sharpness.dims: non-empty array");
  for (const auto& d : dims) {
    int n = get_int(d, "dims[]");
    if (n < 1) throw ConfigError("sharpness dims must be >= 1");
    c.dims.push_back(n);
  }
  c.output = parse_output(j.contains("output") ? j.at("output") : json(), "sharpness.csv");
  c.echo = j;
  return c;
}

nlohmann::json apply_axis(const nlohmann::json& base, const std::string& param,
                          const nlohmann::json& value) {
  nlohmann::json out = base;
  bool applied = false;
  auto& ineq = out.at("inequality");
  if (param == "n") {
    if (ineq.contains("n")) { ineq["n"] = value; applied = true; }
    if (ineq.contains("measure") && ineq.at("measure").contains("n")) {
      ineq["measure"]["n"] = value;
      applied = true;
    }
  } else if (param == "p") {
    if (ineq.contains("measure") && ineq.at("measure").contains("p")) {
      ineq["measure"]["p"] = value;
      applied = true;
    }
    if (ineq.contains("p")) { ineq["p"] = value; applied = true; }
  } else if (param == "k") {
    if (ineq.contains("k")) { ineq["k"] = value; applied = true; }
  } else if (param == "degree") {
    out["suite"]["degree"] = value;
    applied = true;
  } else if (param == "count") {
    out["suite"]["count"] = value;
    applied = true;
  }
  if (!applied)
    throw ConfigError("sweep axis '" + param + "' does not apply to this configuration");
  return out;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

}  // namespace plab
