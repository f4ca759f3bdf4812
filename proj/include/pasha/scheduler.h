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

// Promotion-based asynchronous successive halving (ASHA), its progressive
// variant PASHA, and the fixed-ladder baselines, behind one get_job/report
// state machine.
//
// The scheduler is not thread-safe. Callers that drive it from several
// workers must serialize GetJob and Report; given the same seed and the same
// order of Report calls the issued job sequence is identical.

#ifndef PASHA_SCHEDULER_H_
#define PASHA_SCHEDULER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pasha/core.h"
#include "pasha/ranking.h"
#include "pasha/searcher.h"

namespace pasha {

enum class Method {
  kPasha,
  kAsha,
  kOneEpoch,    // every config at the minimum resource, best one wins
  kNoIncrease,  // PASHA with the ladder frozen at its initial height
  kRandom,      // a uniformly random config, no tuning resources
};

std::string_view MethodName(Method method);
// Accepts pasha, asha, one-epoch, no-increase, random.
Method ParseMethod(std::string_view text);

// Which pair of rungs PASHA compares after a report.
enum class StabilityTrigger {
  // Reports landing in the current top rung K or in K-1 compare K with K-1.
  kTopTwoRungs,
  // Literal pseudocode indices: only reports at K-1 compare K-1 with K-2.
  kPseudocode,
};

struct SchedulerConfig {
  ResourceSpec resources;
  RankingCriterion criterion = SoftRanking{0.025};
  std::size_t num_configs = 256;
  Method method = Method::kPasha;
  std::uint64_t seed = 0;
  StabilityTrigger trigger = StabilityTrigger::kTopTwoRungs;

  void Validate() const;
};

struct Job {
  ConfigId config;
  int rung = 0;
  Resource target_resource = 0;

  friend bool operator==(const Job&, const Job&) = default;
};

struct BestConfig {
  ConfigId config;
  std::size_t universe_index = 0;
  double metric = 0.0;
  Resource max_resources = 0;
};

class Scheduler {
 public:
  // kRandom is not a ladder method and is rejected here; see RunRandomBaseline.
  Scheduler(SchedulerConfig config, std::unique_ptr<Searcher> searcher);

  // The next job for a free worker, or nullopt when nothing is actionable
  // until another job completes. Returning nullopt has no side effects.
  std::optional<Job> GetJob();

  // Records the metric (larger is better) of a previously issued job. PASHA
  // then re-checks the stability of the top two rungs and grows the ladder
  // at most once. Throws InvariantError for unknown or duplicate reports.
  void Report(const Job& job, double metric);

  // All configs drawn, nothing in flight and nothing left to promote.
  bool ShouldStop() const;

  // Best entry of the highest non-empty rung. Throws InvariantError when
  // nothing has been reported yet.
  BestConfig Best() const;

  // Highest rung jobs may currently target.
  int top_rung() const;

  const SchedulerConfig& config() const { return config_; }
  const RungLevels& levels() const { return levels_; }
  const RungLadder& ladder() const { return ladder_; }
  const PashaState& pasha_state() const { return pasha_; }
  int growth_events() const { return growth_events_; }
  std::size_t drawn() const { return records_.size(); }
  std::size_t in_flight() const { return in_flight_.size(); }
  const ConfigRecord& record(ConfigId id) const { return records_.at(id.value); }

 private:
  struct Promotion {
    int from_rung;
    ConfigId config;
  };
  std::optional<Promotion> FindPromotion() const;
  void MaybeGrow(int reported_rung);

  SchedulerConfig config_;
  std::unique_ptr<Searcher> searcher_;
  RungLevels levels_;
  RungLadder ladder_;
  PashaState pasha_;
  int growth_events_ = 0;
  std::vector<ConfigRecord> records_;
  std::set<std::pair<std::uint32_t, int>> in_flight_;
  std::uint64_t completions_ = 0;
};

}  // namespace pasha

#endif  // PASHA_SCHEDULER_H_
