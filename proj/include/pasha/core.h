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

// Domain types shared by the scheduler, the ranking criteria and the
// simulator: configuration identity, rung arithmetic and PASHA growth state.

#ifndef PASHA_CORE_H_
#define PASHA_CORE_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pasha {

using Resource = std::int64_t;

// Identity of one sampled configuration. Assigned densely in draw order,
// starting at 0, by the scheduler that drew it.
struct ConfigId {
  std::uint32_t value = 0;

  friend auto operator<=>(const ConfigId&, const ConfigId&) = default;
};

// A drawn configuration: its trial id plus the point of the search space it
// refers to (the row of a tabulated benchmark).
struct ConfigRecord {
  ConfigId id;
  std::size_t universe_index = 0;
};

// Minimum resource r, reduction factor eta and the safety-net maximum R.
struct ResourceSpec {
  Resource min_resource = 1;
  Resource reduction_factor = 3;
  Resource max_resource = 9;

  // Throws std::invalid_argument unless r >= 1, eta >= 2 and R >= eta^2 r.
  void Validate() const;

  friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

// r * eta^k. Saturates at INT64_MAX instead of overflowing.
Resource RungResource(int k, const ResourceSpec& spec);

// Largest k with r * eta^k <= value, by repeated integer multiplication.
// Requires value >= r.
int FloorLogRungs(Resource value, const ResourceSpec& spec);

// Number of rung levels needed to reach R: the smallest k with r*eta^k >= R.
int CeilLogRungs(Resource value, const ResourceSpec& spec);

// Growth counter t, current resource cap R_t and current top rung index K_t.
struct PashaState {
  int t = 0;
  Resource resource_cap = 0;
  int top_rung = 0;

  friend bool operator==(const PashaState&, const PashaState&) = default;
};

PashaState InitialPashaState(const ResourceSpec& spec);

// One growth step: R_{t+1} = eta R_t and K_{t+1} = K_t + 1. When eta R_t
// would exceed R, the cap is clamped to R and K to floor(log_eta(R/r)); once
// the cap equals R further calls return the state unchanged.
PashaState Grow(const PashaState& state, const ResourceSpec& spec);

inline bool AtSafetyNet(const PashaState& state, const ResourceSpec& spec) {
  return state.resource_cap >= spec.max_resource;
}

// Resource levels of the promotion ladder: r, r*eta, r*eta^2, ... capped so
// that the final level is exactly R (R is appended when it is not itself a
// power-of-eta multiple of r).
class RungLevels {
 public:
  explicit RungLevels(const ResourceSpec& spec);

  int num_rungs() const { return static_cast<int>(levels_.size()); }
  int top_rung() const { return num_rungs() - 1; }
  Resource resource(int k) const { return levels_.at(static_cast<std::size_t>(k)); }

  // Highest rung whose resource is <= cap.
  int TopRungWithin(Resource cap) const;

  const std::vector<Resource>& levels() const { return levels_; }

 private:
  std::vector<Resource> levels_;
};

struct RungEntry {
  ConfigId config;
  double metric = 0.0;  // larger is better
  bool promoted = false;
  std::uint64_t completion_index = 0;

  friend bool operator==(const RungEntry&, const RungEntry&) = default;
};

// Ordering used by every ranking: metric descending, ties by earlier
// completion.
inline bool RanksBefore(const RungEntry& a, const RungEntry& b) {
  if (a.metric != b.metric) return a.metric > b.metric;
  return a.completion_index < b.completion_index;
}

// Per-rung (config, metric) entries with promotion marks.
class RungLadder {
 public:
  RungLadder() = default;
  explicit RungLadder(int num_rungs) : rungs_(static_cast<std::size_t>(num_rungs)) {}

  int num_rungs() const { return static_cast<int>(rungs_.size()); }
  const std::vector<RungEntry>& rung(int k) const { return rungs_.at(static_cast<std::size_t>(k)); }

  bool Contains(int k, ConfigId config) const;
  const RungEntry* Find(int k, ConfigId config) const;

  // Throws InvariantError when the config is already present at rung k, or
  // when k > 0 and the config is not promoted out of rung k-1.
  void Insert(int k, RungEntry entry);

  // Throws InvariantError when the entry does not exist or is already
  // promoted.
  void MarkPromoted(int k, ConfigId config);

  // Entries of rung k in ranking order.
  std::vector<RungEntry> Sorted(int k) const;

  int HighestNonEmpty() const;

  // Throws InvariantError if the prefix property is violated.
  void CheckInvariants() const;

  friend bool operator==(const RungLadder&, const RungLadder&) = default;

 private:
  std::vector<std::vector<RungEntry>> rungs_;
};

std::string ToString(ConfigId id);

}  // namespace pasha

template <>
struct std::hash<pasha::ConfigId> {
  std::size_t operator()(const pasha::ConfigId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // PASHA_CORE_H_
