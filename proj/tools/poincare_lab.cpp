#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plab/config.hpp"
#include "plab/errors.hpp"
#include "plab/runner.hpp"
#include "plab/version.hpp"

namespace {

int default_jobs() {
  const char* env = std::getenv("POINCARE_LAB_JOBS");
  if (!env) return 1;
  int j = std::atoi(env);
  return j >= 1 ? j : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification toolkit for moment-map Poincare inequalities"};
  app.set_version_flag("--version", plab::kToolkitVersion);
  app.fallthrough();

  plab::CliOptions opt;
  opt.jobs = default_jobs();
  std::string config_path;
  long long seed_override = -1;

  app.add_option("--out", opt.out_dir, "Output directory for reports")->capture_default_str();
  app.add_option("--seed-override", seed_override, "Replace all configured seeds");
  app.add_option("--jobs", opt.jobs, "Parallel grid cells (default POINCARE_LAB_JOBS or 1)");
  app.add_flag("--explore", opt.explore, "Gate failures do not affect the exit code");

  auto add_cmd = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "JSON configuration file")->required();
    return cmd;
  };
  CLI::App* verify = add_cmd("verify", "Run an inequality verification suite");
  CLI::App* sweep = add_cmd("sweep", "Run a verification grid and emit a CSV table");
  CLI::App* sample = add_cmd("sample", "Dump measure samples as CSV");
  CLI::App* sharp = add_cmd("sharpness", "Check the simplex eigenvalue equality cases");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }
  if (seed_override >= 0) opt.seed_override = static_cast<std::uint64_t>(seed_override);

  try {
    nlohmann::json config = plab::load_json_file(config_path);
    if (verify->parsed()) return plab::run_verify(config, opt, std::cout);
    if (sweep->parsed()) return plab::run_sweep(config, opt, std::cout);
    if (sample->parsed()) return plab::run_sample(config, opt, std::cout);
    if (sharp->parsed()) return plab::run_sharpness(config, opt, std::cout);
  } catch (const plab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
