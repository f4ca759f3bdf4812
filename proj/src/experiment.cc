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

#include "pasha/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "pasha/error.h"
#include "pasha/format.h"

namespace pasha {
namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; a single value has std 0.
Moments ComputeMoments(const std::vector<double>& values) {
  Moments m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double sum_sq = 0.0;
    for (double v : values) sum_sq += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(sum_sq / static_cast<double>(values.size() - 1));
  }
  return m;
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string TraceFileName(const RunRecord& run) {
  std::ostringstream name;
  name << "cell_m" << run.method_index << "_s" << run.scheduler_seed << "_b" << run.benchmark_seed
       << ".trace";
  return name.str();
}

SchedulerConfig CellConfig(const ExperimentSpec& spec, const MethodSpec& method,
                           std::uint64_t seed) {
  SchedulerConfig config;
  config.resources = spec.resources;
  config.criterion = method.criterion;
  config.num_configs = method.num_configs.value_or(spec.num_configs);
  config.method = method.method;
  config.seed = seed;
  config.trigger = spec.trigger;
  return config;
}

// Rethrows the active exception with `context` prepended, keeping its
// category so the CLI can still map it to an exit code.
[[noreturn]] void RethrowWithContext(const std::string& context) {
  try {
    throw;
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(context + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

std::uint64_t ParseUnsigned(std::string_view text, std::string_view key) {
  const auto value = ParseInteger(text);
  if (!value || *value < 0) {
    throw std::invalid_argument(std::string(key) + ": expected a non-negative integer, got '" +
                                std::string(text) + "'");
  }
  return static_cast<std::uint64_t>(*value);
}

double ParseReal(std::string_view text, std::string_view key) {
  const auto value = ParseDouble(text);
  if (!value) {
    throw std::invalid_argument(std::string(key) + ": expected a number, got '" +
                                std::string(text) + "'");
  }
  return *value;
}

bool ParseBool(std::string_view text, std::string_view key) {
  text = Trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument(std::string(key) + ": expected true or false");
}

}  // namespace

std::string DefaultLabel(Method method, const RankingCriterion& criterion) {
  switch (method) {
    case Method::kAsha:
      return "ASHA";
    case Method::kPasha:
      return "PASHA " + ToString(criterion);
    case Method::kOneEpoch:
      return "One epoch baseline";
    case Method::kNoIncrease:
      return "PASHA no increase";
    case Method::kRandom:
      return "Random baseline";
  }
  return "unknown";
}

void ExperimentSpec::Validate() const {
  if (methods.empty()) throw std::invalid_argument("experiment needs at least one method");
  if (!generator && benchmark_paths.empty()) {
    throw std::invalid_argument("experiment needs a benchmark file or generator settings");
  }
  if (generator) generator->model.Validate();
  if (scheduler_seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
  if (generator && benchmark_seeds.empty()) {
    throw std::invalid_argument("experiment needs at least one benchmark seed");
  }
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  resources.Validate();
  for (std::size_t i = 0; i < methods.size(); ++i) {
    pasha::Validate(methods[i].criterion);
    for (std::size_t j = 0; j < i; ++j) {
      if (methods[i].label == methods[j].label) {
        throw std::invalid_argument("duplicate method label '" + methods[i].label + "'");
      }
    }
  }
}

std::vector<LearningCurveTable> PrepareBenchmarks(const ExperimentSpec& spec) {
  std::vector<LearningCurveTable> tables;
  if (spec.generator) {
    for (std::uint64_t seed : spec.benchmark_seeds) {
      tables.push_back(GenerateBenchmark(spec.generator->num_configs, spec.generator->units,
                                         spec.generator->model, seed));
    }
    return tables;
  }
  for (const auto& path : spec.benchmark_paths) tables.push_back(LoadBenchmark(path));
  return ImputeMissingRows(std::move(tables));
}

std::size_t ReferenceMethod(const std::vector<MethodSpec>& methods) {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i].method == Method::kAsha) return i;
  }
  return 0;
}

ExperimentReport RunExperiment(const ExperimentSpec& spec,
                               const std::vector<LearningCurveTable>& benchmarks) {
  spec.Validate();
  if (benchmarks.empty()) throw std::invalid_argument("no benchmark tables");
  std::vector<std::uint64_t> bench_seeds = spec.benchmark_seeds;
  if (!spec.generator) {
    bench_seeds.clear();
    for (std::size_t i = 0; i < benchmarks.size(); ++i) bench_seeds.push_back(i);
  }
  if (bench_seeds.size() != benchmarks.size()) {
    throw std::invalid_argument("one benchmark table per benchmark seed expected");
  }

  struct Cell {
    std::size_t method;
    std::uint64_t scheduler_seed;
    std::size_t bench;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    for (std::uint64_t s : spec.scheduler_seeds) {
      for (std::size_t b = 0; b < benchmarks.size(); ++b) cells.push_back({m, s, b});
    }
  }
  if (spec.trace_dir) std::filesystem::create_directories(*spec.trace_dir);

  std::vector<RunRecord> runs(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      const MethodSpec& method = spec.methods[cell.method];
      try {
        const LearningCurveTable& table = benchmarks[cell.bench];
        const SchedulerConfig config = CellConfig(spec, method, cell.scheduler_seed);
        const SimResult sim =
            Simulate(config, table, spec.workers, SimOptions{spec.trace_dir.has_value()});
        RunRecord& run = runs[i];
        run.method_index = cell.method;
        run.label = method.label;
        run.scheduler_seed = cell.scheduler_seed;
        run.benchmark_seed = bench_seeds[cell.bench];
        run.metric = sim.chosen_metric_full;
        run.wall_clock = sim.wall_clock;
        run.max_resources = sim.max_resources;
        run.resource_units = sim.resource_units;
        run.chosen_config = table.rows[sim.chosen_row].id;
        if (spec.trace_dir) {
          const std::filesystem::path path = *spec.trace_dir / TraceFileName(run);
          std::ofstream out(path);
          TraceMeta meta{
              {"method", std::string(MethodName(method.method))},
              {"label", method.label},
              {"method_index", std::to_string(cell.method)},
              {"reference_index", std::to_string(ReferenceMethod(spec.methods))},
              {"ranking", ToString(method.criterion)},
              {"scheduler_seed", std::to_string(run.scheduler_seed)},
              {"benchmark_seed", std::to_string(run.benchmark_seed)},
              {"metric_name", table.metric_name},
              {"chosen_config", std::to_string(run.chosen_config)},
              {"chosen_metric_full", FormatShortest(run.metric)},
          };
          WriteTrace(out, meta, sim.trace);
          if (!out) throw DataError("failed writing " + path.string());
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int extra = std::min<int>(spec.threads, static_cast<int>(cells.size())) - 1;
    for (int t = 0; t < extra; ++t) pool.emplace_back(work);
    work();
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (...) {
      RethrowWithContext("method '" + spec.methods[cells[i].method].label + "', scheduler seed " +
                         std::to_string(cells[i].scheduler_seed) + ", benchmark seed " +
                         std::to_string(bench_seeds[cells[i].bench]));
    }
  }
  return Aggregate(std::move(runs), ReferenceMethod(spec.methods), benchmarks.front().metric_name);
}

ExperimentReport Aggregate(std::vector<RunRecord> runs, std::size_t reference,
                           std::string metric_name) {
  std::sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.method_index, a.scheduler_seed, a.benchmark_seed) <
           std::tie(b.method_index, b.scheduler_seed, b.benchmark_seed);
  });
  ExperimentReport report;
  report.metric_name = std::move(metric_name);
  std::size_t begin = 0;
  std::optional<double> reference_runtime;
  while (begin < runs.size()) {
    std::size_t end = begin;
    std::vector<double> metric, runtime, max_res, units;
    while (end < runs.size() && runs[end].method_index == runs[begin].method_index) {
      metric.push_back(runs[end].metric);
      runtime.push_back(runs[end].wall_clock);
      max_res.push_back(static_cast<double>(runs[end].max_resources));
      units.push_back(static_cast<double>(runs[end].resource_units));
      ++end;
    }
    MethodSummary row;
    row.label = runs[begin].label;
    row.repetitions = end - begin;
    const Moments m = ComputeMoments(metric);
    const Moments r = ComputeMoments(runtime);
    const Moments x = ComputeMoments(max_res);
    row.metric_mean = m.mean;
    row.metric_std = m.std;
    row.runtime_mean = r.mean;
    row.runtime_std = r.std;
    row.max_resources_mean = x.mean;
    row.max_resources_std = x.std;
    row.resource_units_mean = ComputeMoments(units).mean;
    if (runs[begin].method_index == reference) reference_runtime = r.mean;
    report.rows.push_back(row);
    begin = end;
  }
  if (!reference_runtime && !report.rows.empty()) reference_runtime = report.rows.front().runtime_mean;
  for (MethodSummary& row : report.rows) row.speedup = Speedup(*reference_runtime, row.runtime_mean);
  report.runs = std::move(runs);
  return report;
}

ReportFormat ParseReportFormat(std::string_view text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

std::string FormatRuntime(double seconds, bool hours) {
  if (hours) return FormatFixed(seconds / 3600.0, 1) + "h";
  return FormatFixed(seconds, 1) + "s";
}

std::string EmitReport(const ExperimentReport& report, ReportFormat format) {
  std::ostringstream out;
  auto runtime_text = [](const MethodSummary& row) {
    const bool hours = row.runtime_mean >= 360.0;
    return FormatRuntime(row.runtime_mean, hours) + " ± " + FormatRuntime(row.runtime_std, hours);
  };
  if (format == ReportFormat::kCsv) {
    out << "method,repetitions,metric_mean,metric_std,runtime_mean_s,runtime_std_s,runtime,"
           "speedup,max_resources_mean,max_resources_std,resource_units_mean\n";
    for (const MethodSummary& row : report.rows) {
      out << CsvField(row.label) << ',' << row.repetitions << ',' << FormatShortest(row.metric_mean)
          << ',' << FormatShortest(row.metric_std) << ',' << FormatShortest(row.runtime_mean) << ','
          << FormatShortest(row.runtime_std) << ',' << runtime_text(row) << ','
          << FormatShortest(row.speedup) << ',' << FormatShortest(row.max_resources_mean) << ','
          << FormatShortest(row.max_resources_std) << ','
          << FormatShortest(row.resource_units_mean) << '\n';
    }
    return out.str();
  }
  out << "| Approach | " << report.metric_name
      << " | Runtime | Speedup factor | Max resources |\n";
  out << "| --- | --- | --- | --- | --- |\n";
  for (const MethodSummary& row : report.rows) {
    const std::string speedup =
        std::isfinite(row.speedup) ? FormatFixed(row.speedup, 1) + "x" : "--";
    out << "| " << row.label << " | " << FormatFixed(row.metric_mean, 4) << " ± "
        << FormatFixed(row.metric_std, 4) << " | " << runtime_text(row) << " | " << speedup
        << " | " << FormatFixed(row.max_resources_mean, 1) << " ± "
        << FormatFixed(row.max_resources_std, 1) << " |\n";
  }
  return out.str();
}

ExperimentReport AggregateTraceDir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".trace") files.push_back(entry.path());
  }
  if (files.empty()) throw DataError("no .trace files in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<RunRecord> runs;
  std::string metric_name;
  std::optional<std::size_t> reference;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    ParsedTrace trace;
    try {
      trace = ReadTrace(in);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    auto meta = [&](const std::string& key) -> const std::string& {
      const auto it = trace.meta.find(key);
      if (it == trace.meta.end()) throw DataError(path.string() + ": missing metadata '" + key + "'");
      return it->second;
    };
    auto meta_int = [&](const std::string& key) {
      const auto v = ParseInteger(meta(key));
      if (!v) throw DataError(path.string() + ": bad metadata '" + key + "'");
      return *v;
    };
    RunRecord run;
    run.method_index = static_cast<std::size_t>(meta_int("method_index"));
    run.label = meta("label");
    run.scheduler_seed = static_cast<std::uint64_t>(meta_int("scheduler_seed"));
    run.benchmark_seed = static_cast<std::uint64_t>(meta_int("benchmark_seed"));
    run.chosen_config = meta_int("chosen_config");
    const auto metric = ParseDouble(meta("chosen_metric_full"));
    if (!metric) throw DataError(path.string() + ": bad metadata 'chosen_metric_full'");
    run.metric = *metric;
    metric_name = meta("metric_name");
    reference = static_cast<std::size_t>(meta_int("reference_index"));
    // Runtime and resources are recomputed from the raw records.
    std::map<std::uint32_t, Resource> checkpoint;
    for (const TraceRecord& r : trace.records) {
      if (r.kind == TraceKind::kStart) {
        Resource& from = checkpoint[r.config.value];
        run.resource_units += r.resource - from;
        from = r.resource;
      } else {
        run.wall_clock = std::max(run.wall_clock, r.time);
        run.max_resources = std::max(run.max_resources, r.resource);
      }
    }
    runs.push_back(std::move(run));
  }
  return Aggregate(std::move(runs), reference.value_or(0), metric_name);
}

std::vector<std::uint64_t> ParseSeedList(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view part = Trim(text.substr(0, comma));
    const std::size_t dash = part.find('-');
    if (dash != std::string_view::npos && dash > 0) {
      const std::uint64_t lo = ParseUnsigned(part.substr(0, dash), "seeds");
      const std::uint64_t hi = ParseUnsigned(part.substr(dash + 1), "seeds");
      if (hi < lo) throw std::invalid_argument("seeds: empty range '" + std::string(part) + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(ParseUnsigned(part, "seeds"));
    }
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
  }
  if (seeds.empty()) throw std::invalid_argument("seeds: empty list");
  return seeds;
}

void ApplyExperimentSetting(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  value = Trim(value);
  auto generator = [&]() -> GeneratorSpec& {
    if (!spec.generator) spec.generator.emplace();
    return *spec.generator;
  };
  if (key == "benchmark") {
    spec.benchmark_paths.clear();
    while (!value.empty()) {
      const std::size_t comma = value.find(',');
      spec.benchmark_paths.emplace_back(std::string(Trim(value.substr(0, comma))));
      value = comma == std::string_view::npos ? std::string_view() : value.substr(comma + 1);
    }
  } else if (key == "benchmark-seeds") {
    spec.benchmark_seeds = ParseSeedList(value);
  } else if (key == "seeds") {
    spec.scheduler_seeds = ParseSeedList(value);
  } else if (key == "eta") {
    spec.resources.reduction_factor = static_cast<Resource>(ParseUnsigned(value, key));
  } else if (key == "min-resource") {
    spec.resources.min_resource = static_cast<Resource>(ParseUnsigned(value, key));
  } else if (key == "max-resource") {
    spec.resources.max_resource = static_cast<Resource>(ParseUnsigned(value, key));
  } else if (key == "num-configs") {
    spec.num_configs = ParseUnsigned(value, key);
  } else if (key == "workers") {
    spec.workers = static_cast<int>(ParseUnsigned(value, key));
  } else if (key == "threads") {
    spec.threads = static_cast<int>(ParseUnsigned(value, key));
  } else if (key == "trace-dir") {
    spec.trace_dir = std::filesystem::path(std::string(value));
  } else if (key == "trigger") {
    if (value == "top-two") {
      spec.trigger = StabilityTrigger::kTopTwoRungs;
    } else if (value == "pseudocode") {
      spec.trigger = StabilityTrigger::kPseudocode;
    } else {
      throw std::invalid_argument("trigger must be top-two or pseudocode");
    }
  } else if (key == "gen-configs") {
    generator().num_configs = ParseUnsigned(value, key);
  } else if (key == "gen-units") {
    generator().units = static_cast<int>(ParseUnsigned(value, key));
  } else if (key == "gen-rstar") {
    generator().model.crossing_horizon = static_cast<int>(ParseUnsigned(value, key));
  } else if (key == "gen-noise") {
    generator().model.noise_std = ParseReal(value, key);
  } else if (key == "gen-family") {
    generator().model.family = ParseCurveFamily(value);
  } else if (key == "gen-hard") {
    generator().model.allow_observed_crossings = ParseBool(value, key);
  } else if (key == "gen-top-spread") {
    generator().model.top_spread = ParseReal(value, key);
  } else if (key == "gen-rate") {
    generator().model.rate = ParseReal(value, key);
  } else if (key == "gen-amplitude-low") {
    generator().model.amplitude_low = ParseReal(value, key);
  } else if (key == "gen-amplitude-high") {
    generator().model.amplitude_high = ParseReal(value, key);
  } else {
    throw std::invalid_argument("unknown experiment setting '" + std::string(key) + "'");
  }
}

ExperimentSpec ParseExperimentConfig(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  std::size_t line_no = 0;
  MethodSpec* section = nullptr;
  std::vector<bool> labelled;  // whether each section set an explicit label
  auto where = [&]() { return "experiment config line " + std::to_string(line_no) + ": "; };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw std::invalid_argument(where() + "unterminated section");
      std::string_view name = Trim(text.substr(1, text.size() - 2));
      if (!name.starts_with("method")) {
        throw std::invalid_argument(where() + "only [method <label>] sections are supported");
      }
      const std::string_view label = Trim(name.substr(6));
      spec.methods.push_back(MethodSpec{std::string(label), Method::kPasha, SoftRanking{0.025}, {}});
      labelled.push_back(!label.empty());
      section = &spec.methods.back();
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument(where() + "expected key = value");
    const std::string_view key = Trim(text.substr(0, eq));
    const std::string_view value = Trim(text.substr(eq + 1));
    try {
      if (section == nullptr) {
        ApplyExperimentSetting(spec, key, value);
      } else if (key == "method") {
        section->method = ParseMethod(value);
      } else if (key == "ranking") {
        section->criterion = ParseCriterion(value);
      } else if (key == "num-configs") {
        section->num_configs = ParseUnsigned(value, key);
      } else {
        throw std::invalid_argument("unknown method setting '" + std::string(key) + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where() + e.what());
    }
  }
  for (std::size_t i = 0; i < spec.methods.size(); ++i) {
    if (!labelled[i]) spec.methods[i].label = DefaultLabel(spec.methods[i].method, spec.methods[i].criterion);
  }
  return spec;
}

ExperimentSpec LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open experiment config " + path.string());
  return ParseExperimentConfig(in);
}

}  // namespace pasha
