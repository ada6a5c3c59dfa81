#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "plab/inequality.hpp"

namespace plab {

// Doubles that may be infinite are serialized as the strings "inf"/"-inf"
// so reports survive a parse-emit round trip byte-identically.
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

std::string verdict_csv_header();
std::string verdict_csv_row(int index, const std::string& variant, const Verdict& v);

struct RunSummary {
  int pass = 0;
  int fail = 0;
  int inconclusive = 0;
  double worst_z = 0.0;
  int gate_violations = 0;       // verdicts with at least one failed gate
  int flagged_verdicts = 0;      // verdicts with a nonzero singular flag
  double max_flagged_fraction = 0.0;
};

RunSummary summarize(const std::vector<Verdict>& verdicts);
nlohmann::json summary_to_json(const RunSummary& s);

// canonical serialization used for every emitted JSON file
std::string dump_json(const nlohmann::json& j);

std::string format_double(double v);  // %.17g

}  // namespace plab
