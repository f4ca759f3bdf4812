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

#include "pasha/simulator.h"

#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <queue>
#include <random>
#include <string>

#include "pasha/error.h"
#include "pasha/format.h"

namespace pasha {
namespace {

struct Completion {
  double time;
  int worker;
  Job job;
  double metric;
};

// Min-heap on (time, worker).
struct LaterCompletion {
  bool operator()(const Completion& a, const Completion& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.worker > b.worker;
  }
};

constexpr std::string_view kTraceColumns = "time,worker,config,rung,resource,metric,kind";

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

SimResult Simulate(const SchedulerConfig& config, const LearningCurveTable& table, int workers,
                   SimOptions options) {
  if (workers < 1) throw std::invalid_argument("need at least one worker");
  if (config.method == Method::kRandom) return RunRandomBaseline(config, table);

  Scheduler scheduler(config, std::make_unique<RandomSearcher>(table.size(), config.seed));
  SimResult result;
  std::priority_queue<Completion, std::vector<Completion>, LaterCompletion> pending;
  std::vector<bool> busy(static_cast<std::size_t>(workers), false);
  std::vector<Resource> checkpoint;  // by ConfigId
  double now = 0.0;

  auto dispatch = [&]() {
    for (int w = 0; w < workers; ++w) {
      if (busy[static_cast<std::size_t>(w)]) continue;
      const std::optional<Job> job = scheduler.GetJob();
      if (!job) return;  // nothing actionable for anyone until the next completion
      const std::size_t row = scheduler.record(job->config).universe_index;
      if (checkpoint.size() <= job->config.value) checkpoint.resize(job->config.value + 1, 0);
      Resource& resumed_from = checkpoint[job->config.value];
      const double duration = table.CostBetween(row, resumed_from, job->target_resource);
      const double metric = table.MetricAt(row, job->target_resource);
      result.resource_units += job->target_resource - resumed_from;
      resumed_from = job->target_resource;
      busy[static_cast<std::size_t>(w)] = true;
      pending.push({now + duration, w, *job, metric});
      ++result.jobs_executed;
      if (options.record_trace) {
        result.trace.push_back(
            {now, w, job->config, job->rung, job->target_resource, std::nullopt, TraceKind::kStart});
      }
    }
  };

  dispatch();
  while (!pending.empty()) {
    const Completion done = pending.top();
    pending.pop();
    now = done.time;
    result.wall_clock = std::max(result.wall_clock, now);
    scheduler.Report(done.job, done.metric);
    busy[static_cast<std::size_t>(done.worker)] = false;
    if (options.record_trace) {
      result.trace.push_back({now, done.worker, done.job.config, done.job.rung,
                              done.job.target_resource, done.metric, TraceKind::kComplete});
    }
    dispatch();
  }
  if (!scheduler.ShouldStop()) {
    throw InvariantError("simulation drained its event queue before the scheduler stopped");
  }

  const BestConfig best = scheduler.Best();
  result.chosen = best.config;
  result.chosen_row = best.universe_index;
  result.chosen_metric = best.metric;
  result.chosen_metric_full = table.FullFidelityMetric(best.universe_index);
  result.max_resources = best.max_resources;
  result.growth_events = scheduler.growth_events();
  result.ladder = scheduler.ladder();
  return result;
}

SimResult RunRandomBaseline(const SchedulerConfig& config, const LearningCurveTable& table) {
  RandomSearcher searcher(table.size(), config.seed);
  std::vector<std::size_t> drawn;
  drawn.reserve(config.num_configs);
  for (std::size_t i = 0; i < config.num_configs; ++i) drawn.push_back(searcher.Draw());
  if (drawn.empty()) throw std::invalid_argument("random baseline needs num_configs >= 1");
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, drawn.size() - 1);
  const std::size_t index = pick(rng);

  SimResult result;
  result.chosen = ConfigId{static_cast<std::uint32_t>(index)};
  result.chosen_row = drawn[index];
  result.chosen_metric = table.FullFidelityMetric(drawn[index]);
  result.chosen_metric_full = result.chosen_metric;
  return result;
}

double Speedup(double reference_seconds, double candidate_seconds) {
  if (candidate_seconds == 0.0) return std::numeric_limits<double>::infinity();
  return reference_seconds / candidate_seconds;
}

void WriteTrace(std::ostream& out, const TraceMeta& meta, const std::vector<TraceRecord>& trace) {
  out << "# pasha-trace 1\n";
  for (const auto& [key, value] : meta) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw std::invalid_argument("trace metadata may not contain '=' in keys or newlines");
    }
    out << "# " << key << '=' << value << '\n';
  }
  out << kTraceColumns << '\n';
  for (const TraceRecord& r : trace) {
    out << FormatShortest(r.time) << ',' << r.worker << ',' << r.config.value << ',' << r.rung
        << ',' << r.resource << ',' << (r.metric ? FormatShortest(*r.metric) : "") << ','
        << (r.kind == TraceKind::kStart ? "start" : "complete") << '\n';
  }
}

ParsedTrace ReadTrace(std::istream& in) {
  ParsedTrace parsed;
  std::string line;
  std::size_t line_no = 0;
  bool saw_magic = false;
  bool saw_columns = false;
  auto fail = [&](const std::string& message) -> void {
    throw DataError("trace line " + std::to_string(line_no) + ": " + message);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    if (line.starts_with("#")) {
      const std::string_view body = Trim(std::string_view(line).substr(1));
      if (!saw_magic) {
        if (body != "pasha-trace 1") fail("missing '# pasha-trace 1' header");
        saw_magic = true;
        continue;
      }
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) fail("metadata line without '='");
      parsed.meta[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
      continue;
    }
    if (!saw_magic) fail("missing '# pasha-trace 1' header");
    if (!saw_columns) {
      if (line != kTraceColumns) fail("unexpected column header");
      saw_columns = true;
      continue;
    }
    const auto fields = SplitCommas(line);
    if (fields.size() != 7) fail("expected 7 fields");
    TraceRecord r;
    const auto time = ParseDouble(fields[0]);
    const auto worker = ParseInteger(fields[1]);
    const auto config = ParseInteger(fields[2]);
    const auto rung = ParseInteger(fields[3]);
    const auto resource = ParseInteger(fields[4]);
    if (!time || !worker || !config || !rung || !resource || *config < 0) fail("bad number");
    r.time = *time;
    r.worker = static_cast<int>(*worker);
    r.config = ConfigId{static_cast<std::uint32_t>(*config)};
    r.rung = static_cast<int>(*rung);
    r.resource = *resource;
    if (fields[6] == "start") {
      r.kind = TraceKind::kStart;
      if (!fields[5].empty()) fail("start records carry no metric");
    } else if (fields[6] == "complete") {
      r.kind = TraceKind::kComplete;
      const auto metric = ParseDouble(fields[5]);
      if (!metric) fail("completion without a metric");
      r.metric = *metric;
    } else {
      fail("unknown record kind '" + std::string(fields[6]) + "'");
    }
    parsed.records.push_back(r);
  }
  if (!saw_columns) throw DataError("trace has no column header");
  return parsed;
}

RungLadder ReplayTrace(const std::vector<TraceRecord>& trace, const SchedulerConfig& config,
                       std::size_t universe_size) {
  Scheduler scheduler(config, std::make_unique<RandomSearcher>(universe_size, config.seed));
  std::map<std::pair<std::uint32_t, int>, Job> issued;
  for (const TraceRecord& r : trace) {
    if (r.kind == TraceKind::kStart) {
      const std::optional<Job> job = scheduler.GetJob();
      const Job expected{r.config, r.rung, r.resource};
      if (!job || !(*job == expected)) {
        throw InvariantError("replay diverged at start of config " + ToString(r.config) +
                             " rung " + std::to_string(r.rung));
      }
      issued[{r.config.value, r.rung}] = *job;
    } else {
      const auto it = issued.find({r.config.value, r.rung});
      if (it == issued.end()) {
        throw InvariantError("replay: completion of config " + ToString(r.config) +
                             " before its start");
      }
      scheduler.Report(it->second, *r.metric);
      issued.erase(it);
    }
  }
  return scheduler.ladder();
}

}  // namespace pasha
