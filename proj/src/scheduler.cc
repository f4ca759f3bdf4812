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

#include "pasha/scheduler.h"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "pasha/error.h"

namespace pasha {

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kPasha:
      return "pasha";
    case Method::kAsha:
      return "asha";
    case Method::kOneEpoch:
      return "one-epoch";
    case Method::kNoIncrease:
      return "no-increase";
    case Method::kRandom:
      return "random";
  }
  return "unknown";
}

Method ParseMethod(std::string_view text) {
  for (Method m : {Method::kPasha, Method::kAsha, Method::kOneEpoch, Method::kNoIncrease,
                   Method::kRandom}) {
    if (text == MethodName(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

void SchedulerConfig::Validate() const {
  resources.Validate();
  pasha::Validate(criterion);
  if (num_configs < 1) throw std::invalid_argument("num_configs must be >= 1");
}

namespace {

SchedulerConfig Validated(SchedulerConfig config) {
  config.Validate();
  return config;
}

}  // namespace

Scheduler::Scheduler(SchedulerConfig config, std::unique_ptr<Searcher> searcher)
    : config_(Validated(std::move(config))),
      searcher_(std::move(searcher)),
      levels_(config_.resources),
      ladder_(levels_.num_rungs()),
      pasha_(InitialPashaState(config_.resources)) {
  if (config_.method == Method::kRandom) {
    throw std::invalid_argument("the random baseline does not run on a rung ladder");
  }
  if (searcher_ == nullptr) throw std::invalid_argument("scheduler needs a searcher");
}

int Scheduler::top_rung() const {
  switch (config_.method) {
    case Method::kAsha:
      return levels_.top_rung();
    case Method::kOneEpoch:
      return 0;
    case Method::kPasha:
    case Method::kNoIncrease:
    case Method::kRandom:
      break;
  }
  return levels_.TopRungWithin(pasha_.resource_cap);
}

std::optional<Scheduler::Promotion> Scheduler::FindPromotion() const {
  const auto eta = static_cast<std::size_t>(config_.resources.reduction_factor);
  for (int k = top_rung() - 1; k >= 0; --k) {
    const std::vector<RungEntry> sorted = ladder_.Sorted(k);
    const std::size_t candidates = sorted.size() / eta;
    for (std::size_t i = 0; i < candidates; ++i) {
      if (!sorted[i].promoted) return Promotion{k, sorted[i].config};
    }
  }
  return std::nullopt;
}

std::optional<Job> Scheduler::GetJob() {
  if (const auto promotion = FindPromotion()) {
    ladder_.MarkPromoted(promotion->from_rung, promotion->config);
    const int rung = promotion->from_rung + 1;
    in_flight_.emplace(promotion->config.value, rung);
    return Job{promotion->config, rung, levels_.resource(rung)};
  }
  if (records_.size() < config_.num_configs) {
    const std::size_t universe_index = searcher_->Draw();
    const ConfigId id{static_cast<std::uint32_t>(records_.size())};
    records_.push_back({id, universe_index});
    in_flight_.emplace(id.value, 0);
    return Job{id, 0, levels_.resource(0)};
  }
  return std::nullopt;
}

void Scheduler::Report(const Job& job, double metric) {
  if (in_flight_.erase({job.config.value, job.rung}) == 0) {
    throw InvariantError("report for config " + ToString(job.config) + " at rung " +
                         std::to_string(job.rung) + " was never issued or is a duplicate");
  }
  if (!std::isfinite(metric)) {
    throw DataError("non-finite metric reported for config " + ToString(job.config));
  }
  ladder_.Insert(job.rung, RungEntry{job.config, metric, false, completions_++});
  if (config_.method == Method::kPasha) MaybeGrow(job.rung);
}

void Scheduler::MaybeGrow(int reported_rung) {
  if (AtSafetyNet(pasha_, config_.resources)) return;
  const int top = top_rung();
  int upper = -1;
  if (config_.trigger == StabilityTrigger::kTopTwoRungs) {
    if (top >= 1 && (reported_rung == top || reported_rung == top - 1)) upper = top;
  } else {
    if (top >= 2 && reported_rung == top - 1) upper = top - 1;
  }
  if (upper < 0) return;
  const RankedList upper_list = RankedList::FromEntries(ladder_.rung(upper));
  const RankedList lower_list = RankedList::FromEntries(ladder_.rung(upper - 1));
  if (!IsStable(config_.criterion, upper_list, lower_list)) {
    pasha_ = Grow(pasha_, config_.resources);
    ++growth_events_;
  }
}

bool Scheduler::ShouldStop() const {
  return records_.size() >= config_.num_configs && in_flight_.empty() && !FindPromotion();
}

BestConfig Scheduler::Best() const {
  const int k = ladder_.HighestNonEmpty();
  if (k < 0) throw InvariantError("no configuration has been evaluated yet");
  const RungEntry best = ladder_.Sorted(k).front();
  return BestConfig{best.config, records_.at(best.config.value).universe_index, best.metric,
                    levels_.resource(k)};
}

}  // namespace pasha
