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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "pasha/benchgen.h"
#include "pasha/error.h"
#include "pasha/experiment.h"
#include "pasha/format.h"
#include "pasha/simulator.h"

using namespace pasha;

namespace {

ExperimentSpec SmallSpec() {
  ExperimentSpec spec;
  GeneratorSpec generator;
  generator.num_configs = 120;
  generator.units = 27;
  generator.model.crossing_horizon = 3;
  spec.generator = generator;
  spec.resources = ResourceSpec{1, 3, 27};
  spec.num_configs = 60;
  spec.workers = 3;
  spec.scheduler_seeds = {0, 1, 2};
  spec.benchmark_seeds = {0, 1};
  spec.methods = {MethodSpec{"ASHA", Method::kAsha, DirectRanking{}, {}},
                  MethodSpec{"PASHA", Method::kPasha, SoftRanking{0.025}, {}},
                  MethodSpec{"Random", Method::kRandom, DirectRanking{}, 100}};
  return spec;
}

std::vector<std::string> Split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, sep)) out.push_back(field);
  return out;
}

std::filesystem::path FreshDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("one method and one seed reports the simulation verbatim") {
  ExperimentSpec spec = SmallSpec();
  spec.methods.resize(2);
  spec.methods.erase(spec.methods.begin());
  spec.scheduler_seeds = {4};
  spec.benchmark_seeds = {1};
  const auto benchmarks = PrepareBenchmarks(spec);
  const ExperimentReport report = RunExperiment(spec, benchmarks);

  SchedulerConfig config;
  config.resources = spec.resources;
  config.criterion = SoftRanking{0.025};
  config.num_configs = spec.num_configs;
  config.seed = 4;
  const SimResult sim = Simulate(config, benchmarks.front(), spec.workers);

  REQUIRE(report.rows.size() == 1);
  const MethodSummary& row = report.rows.front();
  CHECK(row.repetitions == 1);
  CHECK(row.metric_mean == sim.chosen_metric_full);
  CHECK(row.runtime_mean == sim.wall_clock);
  CHECK(row.max_resources_mean == static_cast<double>(sim.max_resources));
  CHECK(row.metric_std == 0.0);
  CHECK(row.runtime_std == 0.0);
  CHECK(row.speedup == 1.0);
}

TEST_CASE("aggregation uses sample std and a ratio of means") {
  std::vector<RunRecord> runs;
  auto add = [&](std::size_t method, std::uint64_t seed, double metric, double seconds, Resource max) {
    RunRecord r;
    r.method_index = method;
    r.label = method == 0 ? "A" : "B";
    r.scheduler_seed = seed;
    r.metric = metric;
    r.wall_clock = seconds;
    r.max_resources = max;
    r.resource_units = max * 2;
    runs.push_back(r);
  };
  add(0, 0, 0.90, 100.0, 81);
  add(0, 1, 0.80, 300.0, 81);
  add(1, 0, 0.85, 50.0, 9);
  add(1, 1, 0.87, 150.0, 27);
  add(1, 2, 0.86, 100.0, 9);
  std::vector<RunRecord> shuffled = runs;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(1));

  const ExperimentReport report = Aggregate(runs, 0, "accuracy");
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].metric_mean == doctest::Approx(0.85));
  CHECK(report.rows[0].metric_std == doctest::Approx(std::sqrt(0.005)));
  CHECK(report.rows[0].runtime_std == doctest::Approx(std::sqrt(20000.0)));
  CHECK(report.rows[0].speedup == 1.0);
  CHECK(report.rows[1].repetitions == 3);
  CHECK(report.rows[1].metric_std == doctest::Approx(0.01));
  CHECK(report.rows[1].speedup == doctest::Approx(2.0));
  CHECK(report.rows[1].max_resources_mean == doctest::Approx(15.0));
  CHECK(report.rows[1].resource_units_mean == doctest::Approx(30.0));
  CHECK(EmitReport(Aggregate(shuffled, 0, "accuracy"), ReportFormat::kCsv) ==
        EmitReport(report, ReportFormat::kCsv));
  CHECK(Aggregate(runs, 1, "accuracy").rows[1].speedup == 1.0);
}

TEST_CASE("experiment reports are reproducible and thread-independent") {
  ExperimentSpec spec = SmallSpec();
  const auto benchmarks = PrepareBenchmarks(spec);
  const ExperimentReport serial = RunExperiment(spec, benchmarks);
  spec.threads = 4;
  const ExperimentReport parallel = RunExperiment(spec, benchmarks);
  for (ReportFormat f : {ReportFormat::kCsv, ReportFormat::kMarkdown}) {
    CHECK(EmitReport(serial, f) == EmitReport(parallel, f));
  }
  REQUIRE(serial.rows.size() == 3);
  CHECK(serial.rows[0].speedup == 1.0);
  CHECK(serial.rows[0].repetitions == 6);
  CHECK(std::isinf(serial.rows[2].speedup));
  CHECK(serial.rows[2].max_resources_mean == 0.0);
  CHECK(serial.runs.size() == 18);
}

TEST_CASE("csv carries every numeric value losslessly and markdown agrees") {
  const ExperimentSpec spec = SmallSpec();
  const ExperimentReport report = RunExperiment(spec, PrepareBenchmarks(spec));
  const std::string csv = EmitReport(report, ReportFormat::kCsv);
  const std::string md = EmitReport(report, ReportFormat::kMarkdown);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "method,repetitions,metric_mean,metric_std,runtime_mean_s,runtime_std_s,runtime,"
                "speedup,max_resources_mean,max_resources_std,resource_units_mean");
  for (const MethodSummary& row : report.rows) {
    REQUIRE(std::getline(lines, line));
    const auto f = Split(line, ',');
    REQUIRE(f.size() == 11);
    CHECK(f[0] == row.label);
    CHECK(ParseDouble(f[2]) == row.metric_mean);
    CHECK(ParseDouble(f[3]) == row.metric_std);
    CHECK(ParseDouble(f[4]) == row.runtime_mean);
    CHECK(ParseDouble(f[5]) == row.runtime_std);
    CHECK(ParseDouble(f[7]) == row.speedup);
    CHECK(ParseDouble(f[8]) == row.max_resources_mean);
    CHECK(ParseDouble(f[10]) == row.resource_units_mean);
    // The markdown row shows the same numbers, rounded.
    CHECK(md.find("| " + row.label + " | " + FormatFixed(row.metric_mean, 4) + " ± ") != std::string::npos);
  }
  CHECK(md.starts_with("| Approach | accuracy | Runtime | Speedup factor | Max resources |\n"));
  CHECK(md.find("| Random | ") != std::string::npos);
  CHECK(md.find(" | -- | ") != std::string::npos);
  CHECK(md.find("1.0x") != std::string::npos);
}

TEST_CASE("labels with commas are quoted in csv") {
  ExperimentReport report;
  MethodSummary row;
  row.label = "PASHA rbo:p=0.5,t=0.5";
  report.rows.push_back(row);
  CHECK(EmitReport(report, ReportFormat::kCsv).find("\"PASHA rbo:p=0.5,t=0.5\",0,") != std::string::npos);
}

TEST_CASE("runtime formatting") {
  CHECK(FormatRuntime(10800.0, true) == "3.0h");
  CHECK(FormatRuntime(8280.0, true) == "2.3h");
  CHECK(FormatRuntime(30.25, false) == "30.2s");
  CHECK(FormatRuntime(0.0, true) == "0.0h");
  CHECK(ParseReportFormat("csv") == ReportFormat::kCsv);
  CHECK(ParseReportFormat("markdown") == ReportFormat::kMarkdown);
  CHECK_THROWS_AS(ParseReportFormat("json"), std::invalid_argument);
}

TEST_CASE("trace files re-aggregate to the same report") {
  ExperimentSpec spec = SmallSpec();
  const auto dir = FreshDir("pasha_test_traces");
  spec.trace_dir = dir;
  spec.threads = 3;
  const ExperimentReport report = RunExperiment(spec, PrepareBenchmarks(spec));
  const ExperimentReport again = AggregateTraceDir(dir);
  CHECK(EmitReport(again, ReportFormat::kCsv) == EmitReport(report, ReportFormat::kCsv));
  CHECK(EmitReport(again, ReportFormat::kMarkdown) == EmitReport(report, ReportFormat::kMarkdown));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(AggregateTraceDir(FreshDir("pasha_test_empty")), DataError);
}

TEST_CASE("reference method") {
  CHECK(ReferenceMethod({MethodSpec{"x", Method::kPasha, SoftRanking{}, {}}, MethodSpec{"y", Method::kAsha, DirectRanking{}, {}}}) == 1);
  CHECK(ReferenceMethod({MethodSpec{"x", Method::kPasha, SoftRanking{}, {}}, MethodSpec{"y", Method::kOneEpoch, DirectRanking{}, {}}}) == 0);
  CHECK(DefaultLabel(Method::kAsha, DirectRanking{}) == "ASHA");
  CHECK(DefaultLabel(Method::kPasha, SoftRanking{0.025}) == "PASHA soft:0.025");
  CHECK(DefaultLabel(Method::kRandom, DirectRanking{}) == "Random baseline");
}

TEST_CASE("failing cells name the method and seeds") {
  ExperimentSpec spec = SmallSpec();
  spec.resources = ResourceSpec{1, 3, 81};  // curves only cover 27 units
  spec.threads = 2;
  try {
    RunExperiment(spec, PrepareBenchmarks(spec));
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    const std::string message = e.what();
    CHECK(message.find("ASHA") != std::string::npos);
    CHECK(message.find("seed") != std::string::npos);
  }
}

TEST_CASE("experiment settings validation") {
  ExperimentSpec spec = SmallSpec();
  spec.methods.clear();
  CHECK_THROWS_AS(spec.Validate(), std::invalid_argument);
  spec = SmallSpec();
  spec.workers = 0;
  CHECK_THROWS_AS(spec.Validate(), std::invalid_argument);
  spec = SmallSpec();
  spec.scheduler_seeds.clear();
  CHECK_THROWS_AS(spec.Validate(), std::invalid_argument);
  spec = SmallSpec();
  spec.generator.reset();
  CHECK_THROWS_AS(spec.Validate(), std::invalid_argument);
}

TEST_CASE("benchmark files with missing rows are imputed") {
  const auto dir = FreshDir("pasha_test_bench");
  CurveModel model;
  LearningCurveTable a = GenerateBenchmark(30, 27, model, 1);
  LearningCurveTable b = GenerateBenchmark(30, 27, model, 2);
  b.rows.pop_back();
  SaveBenchmark(a, dir / "a.tsv");
  SaveBenchmark(b, dir / "b.tsv");
  ExperimentSpec spec = SmallSpec();
  spec.generator.reset();
  spec.benchmark_paths = {dir / "a.tsv", dir / "b.tsv"};
  const auto tables = PrepareBenchmarks(spec);
  REQUIRE(tables.size() == 2);
  CHECK(tables[1].size() == 30);
  CHECK(tables[1].rows[29].metric == a.rows[29].metric);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment config files") {
  std::istringstream in(R"(# sweep
eta = 2
min-resource = 1
max-resource = 16
num-configs = 32
workers = 2
seeds = 0-4
benchmark-seeds = 3,5
trigger = pseudocode
gen-configs = 64
gen-units = 16
gen-rstar = 4
gen-noise = 0.01
gen-hard = true
gen-family = exp-saturation

[method]
method = asha

[method Soft PASHA]
method = pasha
ranking = soft:0.05

[method]
method = random
num-configs = 500
)");
  const ExperimentSpec spec = ParseExperimentConfig(in);
  CHECK(spec.resources.reduction_factor == 2);
  CHECK(spec.resources.max_resource == 16);
  CHECK(spec.num_configs == 32);
  CHECK(spec.workers == 2);
  CHECK(spec.scheduler_seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK(spec.benchmark_seeds == std::vector<std::uint64_t>{3, 5});
  CHECK(spec.trigger == StabilityTrigger::kPseudocode);
  REQUIRE(spec.generator.has_value());
  CHECK(spec.generator->num_configs == 64);
  CHECK(spec.generator->units == 16);
  CHECK(spec.generator->model.crossing_horizon == 4);
  CHECK(spec.generator->model.noise_std == 0.01);
  CHECK(spec.generator->model.allow_observed_crossings);
  CHECK(spec.generator->model.family == CurveFamily::kExponentialSaturation);
  REQUIRE(spec.methods.size() == 3);
  CHECK(spec.methods[0].label == "ASHA");
  CHECK(spec.methods[1].label == "Soft PASHA");
  CHECK(ToString(spec.methods[1].criterion) == "soft:0.05");
  CHECK(spec.methods[2].num_configs == 500u);
  CHECK_NOTHROW(spec.Validate());

  for (const char* bad : {"bogus = 1\n", "eta\n", "[method]\ncolour = red\n", "[other]\n",
                          "workers = many\n", "[method\n"}) {
    CAPTURE(bad);
    std::istringstream text(bad);
    CHECK_THROWS_AS(ParseExperimentConfig(text), std::invalid_argument);
  }
}

TEST_CASE("seed lists") {
  CHECK(ParseSeedList("7") == std::vector<std::uint64_t>{7});
  CHECK(ParseSeedList("0,1,2") == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(ParseSeedList("2-4") == std::vector<std::uint64_t>{2, 3, 4});
  CHECK(ParseSeedList("0-1,9") == std::vector<std::uint64_t>{0, 1, 9});
  for (const char* bad : {"", "a", "4-2", "1,,2", "-3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(ParseSeedList(bad), std::invalid_argument);
  }
}
