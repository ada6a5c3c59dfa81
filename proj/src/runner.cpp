#include "plab/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <ostream>
#include <sstream>

#include "plab/config.hpp"
#include "plab/errors.hpp"
#include "plab/report.hpp"
#include "plab/rng.hpp"
#include "plab/version.hpp"

namespace plab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json effective_config(json echo, const CliOptions& opt) {
  if (opt.seed_override) {
    if (echo.contains("suite")) echo["suite"]["seed"] = *opt.seed_override;
    if (echo.contains("estimator")) echo["estimator"]["seed"] = *opt.seed_override;
    if (echo.contains("seed")) echo["seed"] = *opt.seed_override;
    if (echo.contains("base")) {
      if (echo["base"].contains("suite")) echo["base"]["suite"]["seed"] = *opt.seed_override;
      if (echo["base"].contains("estimator"))
        echo["base"]["estimator"]["seed"] = *opt.seed_override;
    }
  }
  if (opt.explore) echo["explore"] = true;
  return echo;
}

struct VerifyOutcome {
  std::vector<Verdict> verdicts;
  RunSummary summary;
  std::string variant;
};

VerifyOutcome execute_verify(const VerifyConfig& cfg) {
  VerifyOutcome out;
  out.variant = variant_name(cfg.inequality);
  std::vector<TestFunction> fs;
  if (cfg.suite.function == "thin_shell") {
    const Measure* mu = nullptr;
    if (auto* s = std::get_if<Thm13Spec>(&cfg.inequality)) mu = &s->mu;
    else if (auto* s = std::get_if<Thm11Spec>(&cfg.inequality)) mu = &s->mu;
    else if (auto* s = std::get_if<Thm61Spec>(&cfg.inequality)) mu = &s->mu;
    if (!mu) throw ConfigError("thin_shell suite requires a measure-backed variant");
    fs.push_back(thin_shell_function(
        *mu, CounterRng::derive_stream(0x7415, cfg.estimator.seed), cfg.estimator.mc_samples));
  } else {
    fs = make_centered_suite(cfg.inequality, cfg.suite.count, cfg.suite.degree, cfg.suite.seed,
                             cfg.estimator);
  }
  out.verdicts = evaluate_suite(cfg.inequality, fs, cfg.estimator);
  out.summary = summarize(out.verdicts);
  return out;
}

int verdict_exit_code(const RunSummary& s, bool explore) {
  if (s.fail > 0) return 1;
  if (s.gate_violations > 0 && !explore) return 1;
  return 0;
}

}  // namespace

int run_verify(const json& raw_config, const CliOptions& opt, std::ostream& log) {
  json effective = effective_config(raw_config, opt);
  VerifyConfig cfg = parse_verify_config(effective);
  if (opt.explore) cfg.explore = true;

  auto t0 = std::chrono::steady_clock::now();
  VerifyOutcome out = execute_verify(cfg);
  auto t1 = std::chrono::steady_clock::now();

  json report{
      {"schema_version", 1},
      {"version", kToolkitVersion},
      {"command", "verify"},
      {"config", cfg.echo},
      {"summary", summary_to_json(out.summary)},
  };
  json verdicts = json::array();
  for (const auto& v : out.verdicts) verdicts.push_back(verdict_to_json(v));
  report["verdicts"] = verdicts;

  std::ostringstream csv;
  csv << verdict_csv_header() << "\n";
  for (size_t i = 0; i < out.verdicts.size(); ++i)
    csv << verdict_csv_row(static_cast<int>(i), out.variant, out.verdicts[i]) << "\n";

  fs::path dir(opt.out_dir);
  write_file(dir / cfg.output.report_json, dump_json(report));
  write_file(dir / cfg.output.csv, csv.str());

  double secs = std::chrono::duration<double>(t1 - t0).count();
  log << out.variant << ": pass=" << out.summary.pass << " fail=" << out.summary.fail
      << " inconclusive=" << out.summary.inconclusive
      << " gate_violations=" << out.summary.gate_violations << " (" << secs << " s)\n";
  return verdict_exit_code(out.summary, cfg.explore);
}

int run_sweep(const json& raw_config, const CliOptions& opt, std::ostream& log) {
  json effective = effective_config(raw_config, opt);
  SweepConfig cfg = parse_sweep_config(effective);
  if (opt.explore) cfg.explore = true;

  // cartesian grid, axes in declared order
  std::vector<std::vector<json>> cells;  // per cell: one value per axis
  std::vector<json> current(cfg.axes.size());
  std::function<void(size_t)> expand = [&](size_t axis) {
    if (axis == cfg.axes.size()) {
      cells.push_back(current);
      return;
    }
    for (const auto& v : cfg.axes[axis].values) {
      current[axis] = v;
      expand(axis + 1);
    }
  };
  expand(0);

  std::uint64_t base_seed = 1;
  if (cfg.base.contains("estimator") && cfg.base["estimator"].contains("seed"))
    base_seed = cfg.base["estimator"]["seed"].get<std::uint64_t>();

  struct CellResult {
    std::vector<json> values;
    RunSummary summary;
    Verdict first;
    std::string variant;
    json cell_config;
  };

  auto run_cell = [&](size_t index) {
    json body = cfg.base;
    for (size_t a = 0; a < cfg.axes.size(); ++a)
      body = apply_axis(body, cfg.axes[a].param, cells[index][a]);
    std::uint64_t cell_seed = CounterRng::derive_stream(base_seed, index);
    body["estimator"]["seed"] = cell_seed;
    if (body.contains("suite")) body["suite"]["seed"] = cell_seed;
    body["schema_version"] = 1;
    VerifyConfig vc = parse_verify_config(body);
    VerifyOutcome out = execute_verify(vc);
    CellResult res;
    res.values = cells[index];
    res.summary = out.summary;
    res.first = out.verdicts.front();
    res.variant = out.variant;
    res.cell_config = body;
    return res;
  };

  std::vector<CellResult> results(cells.size());
  int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < cells.size(); ++i) results[i] = run_cell(i);
  } else {
    std::vector<std::future<CellResult>> futs(cells.size());
    size_t next = 0;
    while (next < cells.size()) {
      size_t batch = std::min<size_t>(jobs, cells.size() - next);
      for (size_t b = 0; b < batch; ++b)
        futs[next + b] = std::async(std::launch::async, run_cell, next + b);
      for (size_t b = 0; b < batch; ++b) results[next + b] = futs[next + b].get();
      next += batch;
    }
  }

  std::ostringstream csv;
  for (const auto& a : cfg.axes) csv << a.param << ",";
  csv << "variant,status,lhs,lhs_se,rhs,rhs_se,margin,z_margin,pass,fail,inconclusive,"
         "gate_violations\n";
  int total_fail = 0, total_gate = 0;
  for (const auto& r : results) {
    for (const auto& v : r.values) csv << v.dump() << ",";
    const Verdict& v = r.first;
    csv << r.variant << "," << to_string(v.status) << "," << format_double(v.lhs) << ","
        << format_double(v.lhs_se) << "," << format_double(v.rhs) << ","
        << format_double(v.rhs_se) << "," << format_double(v.margin()) << ","
        << format_double(v.z_margin()) << "," << r.summary.pass << "," << r.summary.fail << ","
        << r.summary.inconclusive << "," << r.summary.gate_violations << "\n";
    total_fail += r.summary.fail;
    total_gate += r.summary.gate_violations;
  }

  json report{{"schema_version", 1},
              {"version", kToolkitVersion},
              {"command", "sweep"},
              {"config", cfg.echo},
              {"cells", json::array()}};
  for (const auto& r : results) {
    json cell{{"values", r.values},
              {"variant", r.variant},
              {"summary", summary_to_json(r.summary)},
              {"first_verdict", verdict_to_json(r.first)}};
    report["cells"].push_back(cell);
  }

  fs::path dir(opt.out_dir);
  write_file(dir / cfg.output.report_json, dump_json(report));
  write_file(dir / cfg.output.csv, csv.str());
  log << "sweep: " << results.size() << " cells, fail=" << total_fail
      << " gate_violations=" << total_gate << "\n";
  if (total_fail > 0) return 1;
  if (total_gate > 0 && !cfg.explore) return 1;
  return 0;
}

int run_sample(const json& raw_config, const CliOptions& opt, std::ostream& log) {
  json effective = effective_config(raw_config, opt);
  SampleConfig cfg = parse_sample_config(effective);
  Mat pts = cfg.measure.sample(cfg.seed, cfg.count);
  std::ostringstream os;
  write_samples_csv(os, cfg.measure, cfg.seed, pts, kToolkitVersion);
  fs::path dir(opt.out_dir);
  write_file(dir / cfg.output.csv, os.str());
  log << "sample: " << cfg.count << " points from " << cfg.measure.descriptor() << "\n";
  return 0;
}

int run_sharpness(const json& raw_config, const CliOptions& opt, std::ostream& log) {
  json effective = effective_config(raw_config, opt);
  SharpnessConfig cfg = parse_sharpness_config(effective);
  std::ostringstream csv;
  csv << "n,lhs,rhs,relative_gap\n";
  json rows = json::array();
  double worst = 0.0;
  for (int n : cfg.dims) {
    SharpnessReport rep = sharpness_probe(SimplexVariant::Cor44, n);
    csv << rep.n << "," << format_double(rep.lhs) << "," << format_double(rep.rhs) << ","
        << format_double(rep.relative_gap) << "\n";
    rows.push_back({{"n", rep.n},
                    {"lhs", json_number(rep.lhs)},
                    {"rhs", json_number(rep.rhs)},
                    {"relative_gap", json_number(rep.relative_gap)}});
    worst = std::max(worst, rep.relative_gap);
  }
  json report{{"schema_version", 1},
              {"version", kToolkitVersion},
              {"command", "sharpness"},
              {"config", cfg.echo},
              {"rows", rows},
              {"worst_relative_gap", json_number(worst)}};
  fs::path dir(opt.out_dir);
  write_file(dir / cfg.output.report_json, dump_json(report));
  write_file(dir / cfg.output.csv, csv.str());
  log << "sharpness: worst relative gap " << worst << "\n";
  return 0;
}

}  // namespace plab
