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

// Experiment protocol: every (method, scheduler seed, benchmark seed) cell is
// simulated, then folded into per-method mean and sample standard deviation
// of the chosen config's full-fidelity metric, runtime and max resources.
// Speedups are ratios of mean runtimes against the reference method (ASHA
// when present, otherwise the first method).

#ifndef PASHA_EXPERIMENT_H_
#define PASHA_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pasha/benchgen.h"
#include "pasha/scheduler.h"
#include "pasha/simulator.h"

namespace pasha {

struct MethodSpec {
  std::string label;
  Method method = Method::kPasha;
  RankingCriterion criterion = SoftRanking{0.025};
  // Overrides ExperimentSpec::num_configs (the random baseline is often run
  // with more draws).
  std::optional<std::size_t> num_configs;
};

std::string DefaultLabel(Method method, const RankingCriterion& criterion);

struct GeneratorSpec {
  std::size_t num_configs = 256;
  int units = 81;
  CurveModel model;
};

struct ExperimentSpec {
  // One path per benchmark seed; ignored when `generator` is set.
  std::vector<std::filesystem::path> benchmark_paths;
  std::optional<GeneratorSpec> generator;
  std::vector<std::uint64_t> benchmark_seeds = {0};

  std::vector<MethodSpec> methods;
  ResourceSpec resources{1, 3, 81};
  std::size_t num_configs = 256;
  int workers = 4;
  std::vector<std::uint64_t> scheduler_seeds = {0};
  StabilityTrigger trigger = StabilityTrigger::kTopTwoRungs;
  int threads = 1;
  // When set, one trace file per cell is written here.
  std::optional<std::filesystem::path> trace_dir;

  // Throws std::invalid_argument.
  void Validate() const;
};

struct RunRecord {
  std::size_t method_index = 0;
  std::string label;
  std::uint64_t scheduler_seed = 0;
  std::uint64_t benchmark_seed = 0;
  double metric = 0.0;  // full-fidelity metric of the chosen config
  double wall_clock = 0.0;
  Resource max_resources = 0;
  Resource resource_units = 0;
  std::int64_t chosen_config = 0;  // benchmark row id
};

struct MethodSummary {
  std::string label;
  std::size_t repetitions = 0;
  double metric_mean = 0.0;
  double metric_std = 0.0;
  double runtime_mean = 0.0;
  double runtime_std = 0.0;
  double speedup = 1.0;  // +inf when the method spends no time
  double max_resources_mean = 0.0;
  double max_resources_std = 0.0;
  double resource_units_mean = 0.0;
};

struct ExperimentReport {
  std::string metric_name = "accuracy";
  std::vector<MethodSummary> rows;
  std::vector<RunRecord> runs;
};

// Loads (and imputes) or generates the benchmark tables, one per benchmark
// seed.
std::vector<LearningCurveTable> PrepareBenchmarks(const ExperimentSpec& spec);

// Any failing cell aborts with the method label and seeds in the message.
ExperimentReport RunExperiment(const ExperimentSpec& spec,
                               const std::vector<LearningCurveTable>& benchmarks);

// Deterministic fold: runs are sorted by (method, scheduler seed, benchmark
// seed) first. `reference` indexes the method speedups are computed against.
ExperimentReport Aggregate(std::vector<RunRecord> runs, std::size_t reference,
                           std::string metric_name);

// Index of ASHA among the methods, else 0.
std::size_t ReferenceMethod(const std::vector<MethodSpec>& methods);

enum class ReportFormat { kCsv, kMarkdown };
ReportFormat ParseReportFormat(std::string_view text);

std::string EmitReport(const ExperimentReport& report, ReportFormat format);

// "3.0h" above 0.1 h, otherwise seconds with one decimal.
std::string FormatRuntime(double seconds, bool hours);

// Re-aggregates the trace files written by RunExperiment (every *.trace file
// in `dir`). The result equals the report of the run that wrote them.
ExperimentReport AggregateTraceDir(const std::filesystem::path& dir);

// Flat "key = value" experiment file with "[method <label>]" sections.
ExperimentSpec ParseExperimentConfig(std::istream& in);
ExperimentSpec LoadExperimentConfig(const std::filesystem::path& path);

// Applies one top-level key to the spec; shared by the config file parser
// and the command line. Throws std::invalid_argument for unknown keys.
void ApplyExperimentSetting(ExperimentSpec& spec, std::string_view key, std::string_view value);

std::vector<std::uint64_t> ParseSeedList(std::string_view text);

}  // namespace pasha

#endif  // PASHA_EXPERIMENT_H_
