#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace plab {

struct CliOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;
  bool explore = false;
};

// Exit codes: 0 clean, 1 verification failures (FAIL verdicts, or gate
// violations outside exploration mode). Config problems raise ConfigError
// (exit 2 at the CLI), evaluation problems raise runtime errors (exit 3).
int run_verify(const nlohmann::json& config, const CliOptions& opt, std::ostream& log);
int run_sweep(const nlohmann::json& config, const CliOptions& opt, std::ostream& log);
int run_sample(const nlohmann::json& config, const CliOptions& opt, std::ostream& log);
int run_sharpness(const nlohmann::json& config, const CliOptions& opt, std::ostream& log);

}  // namespace plab
