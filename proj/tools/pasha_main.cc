/*
 * Copyright 2026 The pasha Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// pasha: generate synthetic benchmarks, run scheduling experiments in
// simulation, re-aggregate trace files and inspect learning-curve crossings.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
// violation.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pasha/benchgen.h"
#include "pasha/error.h"
#include "pasha/experiment.h"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kInternalError = 3;

void WriteOutput(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw pasha::DataError("cannot write " + path);
  out << text;
}

struct GenerateArgs {
  std::size_t configs = 256;
  int units = 81;
  pasha::CurveModel model;
  std::string family = "power-law";
  std::uint64_t seed = 0;
  std::string out;
};

struct RunArgs {
  std::string config_file;
  std::vector<std::string> settings;  // "key=value" pairs collected from flags
  std::vector<std::string> methods;
  std::string ranking = "soft:0.025";
  std::optional<std::size_t> random_draws;
  std::string out;
  std::string format = "markdown";
};

int RunGenerate(const GenerateArgs& args) {
  pasha::CurveModel model = args.model;
  model.family = pasha::ParseCurveFamily(args.family);
  const pasha::LearningCurveTable table =
      pasha::GenerateBenchmark(args.configs, args.units, model, args.seed);
  if (args.out.empty() || args.out == "-") {
    pasha::SaveBenchmark(table, std::cout);
  } else {
    pasha::SaveBenchmark(table, std::filesystem::path(args.out));
  }
  return 0;
}

int RunRun(const RunArgs& args, const std::vector<std::pair<std::string, std::string>>& overrides) {
  pasha::ExperimentSpec spec;
  if (!args.config_file.empty()) spec = pasha::LoadExperimentConfig(args.config_file);
  for (const auto& [key, value] : overrides) pasha::ApplyExperimentSetting(spec, key, value);
  if (!args.methods.empty()) {
    const pasha::RankingCriterion criterion = pasha::ParseCriterion(args.ranking);
    spec.methods.clear();
    for (const std::string& name : args.methods) {
      pasha::MethodSpec method;
      method.method = pasha::ParseMethod(name);
      method.criterion = criterion;
      method.label = pasha::DefaultLabel(method.method, method.criterion);
      if (method.method == pasha::Method::kRandom) method.num_configs = args.random_draws;
      spec.methods.push_back(std::move(method));
    }
  }
  const pasha::ReportFormat format = pasha::ParseReportFormat(args.format);
  spec.Validate();
  const auto benchmarks = pasha::PrepareBenchmarks(spec);
  const pasha::ExperimentReport report = pasha::RunExperiment(spec, benchmarks);
  WriteOutput(pasha::EmitReport(report, format), args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-fidelity scheduling (ASHA / PASHA) on tabulated learning curves"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic tabulated benchmark");
  generate->add_option("--configs", gen.configs, "Number of configurations")->capture_default_str();
  generate->add_option("--units", gen.units, "Resource units per curve")->capture_default_str();
  generate->add_option("--rstar", gen.model.crossing_horizon, "Crossing horizon R*")
      ->capture_default_str();
  generate->add_option("--noise", gen.model.noise_std, "Observation noise std")
      ->capture_default_str();
  generate->add_option("--family", gen.family, "power-law or exp-saturation")
      ->capture_default_str();
  generate->add_flag("--hard", gen.model.allow_observed_crossings,
                     "Allow noise to create crossings after R*");
  generate->add_option("--top-spread", gen.model.top_spread, "Asymptote tail exponent")
      ->capture_default_str();
  generate->add_option("--rate", gen.model.rate, "Curve decay rate")->capture_default_str();
  generate->add_option("--amplitude-low", gen.model.amplitude_low)->capture_default_str();
  generate->add_option("--amplitude-high", gen.model.amplitude_high)->capture_default_str();
  generate->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  generate->add_option("--out", gen.out, "Output file (default stdout)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate methods over seeds and report");
  run_cmd->add_option("--config", run.config_file, "Experiment file (flags override it)");
  std::vector<std::string> benchmark_paths;
  run_cmd->add_option("--benchmark", benchmark_paths, "Benchmark file, one per benchmark seed");
  run_cmd->add_option("--method", run.methods, "pasha|asha|one-epoch|no-increase|random");
  run_cmd->add_option("--ranking", run.ranking, "Stability criterion for pasha")
      ->capture_default_str();
  run_cmd->add_option("--random-draws", run.random_draws,
                      "Configurations drawn by the random baseline");
  run_cmd->add_option("--out", run.out, "Report file (default stdout)");
  run_cmd->add_option("--format", run.format, "csv or markdown")->capture_default_str();
  // Settings shared with the experiment file; applied after it.
  const std::vector<std::pair<std::string, std::string>> setting_flags = {
      {"eta", "Reduction factor"},
      {"min-resource", "Minimum resource r"},
      {"max-resource", "Maximum resource R"},
      {"num-configs", "Configurations drawn per run"},
      {"workers", "Simulated workers"},
      {"seeds", "Scheduler seeds, e.g. 0-4 or 0,2,7"},
      {"benchmark-seeds", "Generator seeds when no --benchmark is given"},
      {"trigger", "top-two or pseudocode"},
      {"threads", "Runs executed in parallel"},
      {"trace-dir", "Write one trace file per run here"},
      {"gen-configs", "Generated benchmark: configurations"},
      {"gen-units", "Generated benchmark: resource units"},
      {"gen-rstar", "Generated benchmark: crossing horizon"},
      {"gen-noise", "Generated benchmark: observation noise std"},
      {"gen-family", "Generated benchmark: power-law or exp-saturation"},
      {"gen-hard", "Generated benchmark: allow noisy crossings (true/false)"},
      {"gen-top-spread", "Generated benchmark: asymptote tail exponent"},
      {"gen-rate", "Generated benchmark: decay rate"},
      {"gen-amplitude-low", "Generated benchmark: lowest relative amplitude"},
      {"gen-amplitude-high", "Generated benchmark: highest relative amplitude"}};
  std::vector<std::string> setting_values(setting_flags.size());
  std::vector<CLI::Option*> setting_options;
  for (std::size_t i = 0; i < setting_flags.size(); ++i) {
    setting_options.push_back(run_cmd->add_option("--" + setting_flags[i].first,
                                                  setting_values[i], setting_flags[i].second));
  }

  std::string traces_dir;
  std::string report_out;
  std::string report_format = "markdown";
  auto* report = app.add_subcommand("report", "Re-aggregate trace files written by run");
  report->add_option("--traces", traces_dir, "Directory of .trace files")->required();
  report->add_option("--out", report_out, "Report file (default stdout)");
  report->add_option("--format", report_format, "csv or markdown")->capture_default_str();

  std::string crossings_path;
  bool crossings_summary = false;
  auto* crossings = app.add_subcommand("crossings", "List learning-curve crossings");
  crossings->add_option("--benchmark", crossings_path, "Benchmark file")->required();
  crossings->add_flag("--summary", crossings_summary, "Only print the summary line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (*generate) return RunGenerate(gen);
    if (*run_cmd) {
      std::vector<std::pair<std::string, std::string>> overrides;
      if (!benchmark_paths.empty()) {
        std::string joined;
        for (const auto& p : benchmark_paths) joined += (joined.empty() ? "" : ",") + p;
        overrides.emplace_back("benchmark", joined);
      }
      for (std::size_t i = 0; i < setting_flags.size(); ++i) {
        if (setting_options[i]->count() > 0) overrides.emplace_back(setting_flags[i].first, setting_values[i]);
      }
      return RunRun(run, overrides);
    }
    if (*report) {
      const pasha::ExperimentReport aggregated = pasha::AggregateTraceDir(traces_dir);
      WriteOutput(pasha::EmitReport(aggregated, pasha::ParseReportFormat(report_format)), report_out);
      return 0;
    }
    if (*crossings) {
      const pasha::LearningCurveTable table = pasha::LoadBenchmark(std::filesystem::path(crossings_path));
      const auto found = pasha::CrossingReport(table);
      int latest = 0;
      for (const auto& c : found) {
        latest = std::max(latest, c.last_crossing);
        if (!crossings_summary) std::cout << c.first << '\t' << c.second << '\t' << c.last_crossing << '\n';
      }
      std::cout << "# pairs=" << found.size() << " max_last_crossing=" << latest << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const pasha::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
