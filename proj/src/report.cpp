#include "plab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "plab/errors.hpp"

namespace plab {

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("expected a number");
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : v.gates)
    gates.push_back({{"name", g.name}, {"pass", g.pass}, {"detail", g.detail}});
  return nlohmann::json{
      {"lhs", json_number(v.lhs)},
      {"lhs_se", json_number(v.lhs_se)},
      {"rhs", json_number(v.rhs)},
      {"rhs_se", json_number(v.rhs_se)},
      {"margin", json_number(v.margin())},
      {"z_margin", json_number(v.z_margin())},
      {"status", to_string(v.status)},
      {"flagged_singular_fraction", json_number(v.flagged_singular_fraction)},
      {"gates", gates},
      {"estimator",
       {{"kind", v.estimator.kind},
        {"samples", v.estimator.samples},
        {"nodes", v.estimator.nodes},
        {"seed", v.estimator.seed}}},
  };
}

Verdict verdict_from_json(const nlohmann::json& j) {
  Verdict v;
  v.lhs = number_from_json(j.at("lhs"));
  v.lhs_se = number_from_json(j.at("lhs_se"));
  v.rhs = number_from_json(j.at("rhs"));
  v.rhs_se = number_from_json(j.at("rhs_se"));
  std::string st = j.at("status").get<std::string>();
  v.status = st == "PASS" ? Status::PASS : (st == "FAIL" ? Status::FAIL : Status::INCONCLUSIVE);
  v.flagged_singular_fraction = number_from_json(j.at("flagged_singular_fraction"));
  for (const auto& g : j.at("gates"))
    v.gates.push_back({g.at("name").get<std::string>(), g.at("pass").get<bool>(),
                       g.at("detail").get<std::string>()});
  const auto& e = j.at("estimator");
  v.estimator.kind = e.at("kind").get<std::string>();
  v.estimator.samples = e.at("samples").get<long>();
  v.estimator.nodes = e.at("nodes").get<int>();
  v.estimator.seed = e.at("seed").get<std::uint64_t>();
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string verdict_csv_header() {
  return "index,variant,status,lhs,lhs_se,rhs,rhs_se,margin,z_margin,"
         "flagged_singular_fraction,gates_failed,estimator,samples,nodes,seed";
}

std::string verdict_csv_row(int index, const std::string& variant, const Verdict& v) {
  int failed = 0;
  for (const auto& g : v.gates)
    if (!g.pass) ++failed;
  std::ostringstream os;
  os << index << ',' << variant << ',' << to_string(v.status) << ',' << format_double(v.lhs)
     << ',' << format_double(v.lhs_se) << ',' << format_double(v.rhs) << ','
     << format_double(v.rhs_se) << ',' << format_double(v.margin()) << ','
     << format_double(v.z_margin()) << ',' << format_double(v.flagged_singular_fraction) << ','
     << failed << ',' << v.estimator.kind << ',' << v.estimator.samples << ','
     << v.estimator.nodes << ',' << v.estimator.seed;
  return os.str();
}

RunSummary summarize(const std::vector<Verdict>& verdicts) {
  RunSummary s;
  s.worst_z = std::numeric_limits<double>::infinity();
  for (const auto& v : verdicts) {
    switch (v.status) {
      case Status::PASS: ++s.pass; break;
      case Status::FAIL: ++s.fail; break;
      case Status::INCONCLUSIVE: ++s.inconclusive; break;
    }
    s.worst_z = std::min(s.worst_z, v.z_margin());
    if (!v.gates_ok()) ++s.gate_violations;
    if (v.flagged_singular_fraction > 0.0) {
      ++s.flagged_verdicts;
      s.max_flagged_fraction = std::max(s.max_flagged_fraction, v.flagged_singular_fraction);
    }
  }
  if (verdicts.empty()) s.worst_z = 0.0;
  return s;
}

nlohmann::json summary_to_json(const RunSummary& s) {
  return nlohmann::json{
      {"pass", s.pass},
      {"fail", s.fail},
      {"inconclusive", s.inconclusive},
      {"worst_z", json_number(s.worst_z)},
      {"gate_violations", s.gate_violations},
      {"flagged_verdicts", s.flagged_verdicts},
      {"max_flagged_fraction", json_number(s.max_flagged_fraction)},
  };
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace plab
