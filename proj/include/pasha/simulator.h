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

// Deterministic discrete-event simulation of W asynchronous workers running
// scheduler jobs against a tabulated benchmark.
//
// A promoted config resumes from its last evaluated resource, so a job pays
// only for the units between its checkpoint and its target. Completions are
// processed in (time, worker) order; after each one every idle worker polls
// the scheduler again, in worker order.

#ifndef PASHA_SIMULATOR_H_
#define PASHA_SIMULATOR_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pasha/curve_table.h"
#include "pasha/scheduler.h"

namespace pasha {

enum class TraceKind { kStart, kComplete };

struct TraceRecord {
  double time = 0.0;
  int worker = 0;
  ConfigId config;
  int rung = 0;
  Resource resource = 0;
  std::optional<double> metric;  // set on completions
  TraceKind kind = TraceKind::kStart;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SimResult {
  double wall_clock = 0.0;
  ConfigId chosen;
  std::size_t chosen_row = 0;
  double chosen_metric = 0.0;       // at the rung it was selected from
  double chosen_metric_full = 0.0;  // full-fidelity metric from the table
  Resource max_resources = 0;
  std::size_t jobs_executed = 0;
  Resource resource_units = 0;  // total units trained across all jobs
  int growth_events = 0;
  std::vector<TraceRecord> trace;
  RungLadder ladder;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct SimOptions {
  bool record_trace = true;
};

// Runs one scheduler to quiescence. The random searcher is seeded with
// config.seed over the table's rows. kRandom dispatches to
// RunRandomBaseline. Throws DataError when a curve is too short.
SimResult Simulate(const SchedulerConfig& config, const LearningCurveTable& table, int workers,
                   SimOptions options = {});

// Draws config.num_configs rows and returns one of them uniformly at random.
// Zero runtime and zero resources.
SimResult RunRandomBaseline(const SchedulerConfig& config, const LearningCurveTable& table);

// reference.wall_clock / candidate.wall_clock; +inf when the candidate took
// no time.
double Speedup(double reference_seconds, double candidate_seconds);

// Trace files: "#"-prefixed key=value metadata lines, a column header and one
// line per record.
//
//   # pasha-trace 1
//   # method=asha
//   ...
//   time,worker,config,rung,resource,metric,kind
//   0,0,0,0,1,,start
//   31.5,0,0,0,1,0.4125,complete
using TraceMeta = std::map<std::string, std::string>;

void WriteTrace(std::ostream& out, const TraceMeta& meta, const std::vector<TraceRecord>& trace);

struct ParsedTrace {
  TraceMeta meta;
  std::vector<TraceRecord> records;
};
// Throws DataError with a line number on malformed input.
ParsedTrace ReadTrace(std::istream& in);

// Feeds a recorded trace through a fresh scheduler: each start must match
// the job the scheduler issues, each completion is reported. Returns the
// final ladder. Throws InvariantError on divergence.
RungLadder ReplayTrace(const std::vector<TraceRecord>& trace, const SchedulerConfig& config,
                       std::size_t universe_size);

}  // namespace pasha

#endif  // PASHA_SIMULATOR_H_
