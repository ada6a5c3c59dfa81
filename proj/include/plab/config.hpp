#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "plab/inequality.hpp"

namespace plab {

// Suite of probe functions driven through one inequality spec.
struct SuiteConfig {
  std::string function = "polynomials";  // "polynomials" | "thin_shell"
  int count = 50;
  int degree = 3;
  std::uint64_t seed = 1;
};

struct OutputConfig {
  std::string report_json = "report.json";
  std::string csv = "";  // default depends on the command
};

struct VerifyConfig {
  nlohmann::json echo;  // effective config, seeds resolved
  InequalitySpec inequality;
  SuiteConfig suite;
  EstimatorSettings estimator;
  bool explore = false;
  OutputConfig output;
};

struct SweepAxis {
  std::string param;  // "n" | "p" | "k" | "degree" | "count"
  std::vector<nlohmann::json> values;
};

struct SweepConfig {
  nlohmann::json echo;
  nlohmann::json base;  // verify-config body, patched per cell
  std::vector<SweepAxis> axes;
  bool explore = false;
  OutputConfig output;
};

struct SampleConfig {
  nlohmann::json echo;
  Measure measure;
  long count = 100;
  std::uint64_t seed = 1;
  OutputConfig output;
};

struct SharpnessConfig {
  nlohmann::json echo;
  std::vector<int> dims;
  OutputConfig output;
};

// All parsers reject unknown keys and missing required keys with ConfigError.
VerifyConfig parse_verify_config(const nlohmann::json& j);
SweepConfig parse_sweep_config(const nlohmann::json& j);
SampleConfig parse_sample_config(const nlohmann::json& j);
SharpnessConfig parse_sharpness_config(const nlohmann::json& j);

Measure parse_measure(const nlohmann::json& j);
InequalitySpec parse_inequality(const nlohmann::json& j);

// Applies one sweep-axis value to a verify-config body ("n", "p", "k",
// "degree", "count" at their well-known locations).
nlohmann::json apply_axis(const nlohmann::json& base, const std::string& param,
                          const nlohmann::json& value);

nlohmann::json load_json_file(const std::string& path);

}  // namespace plab
