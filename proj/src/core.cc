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

#include "pasha/core.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "pasha/error.h"

namespace pasha {
namespace {

Resource SaturatingMul(Resource a, Resource b) {
  if (a != 0 && b > std::numeric_limits<Resource>::max() / a) {
    return std::numeric_limits<Resource>::max();
  }
  return a * b;
}

}  // namespace

void ResourceSpec::Validate() const {
  if (min_resource < 1) {
    throw std::invalid_argument("min_resource must be >= 1");
  }
  if (reduction_factor < 2) {
    throw std::invalid_argument("reduction_factor must be >= 2");
  }
  const Resource initial_cap =
      SaturatingMul(SaturatingMul(reduction_factor, reduction_factor), min_resource);
  if (max_resource < initial_cap) {
    throw std::invalid_argument("max_resource must be >= eta^2 * min_resource (" +
                                std::to_string(initial_cap) + ")");
  }
}

Resource RungResource(int k, const ResourceSpec& spec) {
  if (k < 0) throw std::invalid_argument("rung index must be >= 0");
  Resource value = spec.min_resource;
  for (int i = 0; i < k; ++i) value = SaturatingMul(value, spec.reduction_factor);
  return value;
}

int FloorLogRungs(Resource value, const ResourceSpec& spec) {
  if (value < spec.min_resource) {
    throw std::invalid_argument("FloorLogRungs: value below min_resource");
  }
  int k = 0;
  Resource level = spec.min_resource;
  while (true) {
    const Resource next = SaturatingMul(level, spec.reduction_factor);
    if (next > value || next == std::numeric_limits<Resource>::max()) break;
    level = next;
    ++k;
  }
  return k;
}

int CeilLogRungs(Resource value, const ResourceSpec& spec) {
  int k = 0;
  Resource level = spec.min_resource;
  while (level < value) {
    level = SaturatingMul(level, spec.reduction_factor);
    ++k;
  }
  return k;
}

PashaState InitialPashaState(const ResourceSpec& spec) {
  PashaState state;
  state.t = 0;
  state.resource_cap = RungResource(2, spec);
  state.top_rung = FloorLogRungs(state.resource_cap, spec);
  return state;
}

PashaState Grow(const PashaState& state, const ResourceSpec& spec) {
  if (AtSafetyNet(state, spec)) return state;
  PashaState next = state;
  next.t = state.t + 1;
  const Resource grown = SaturatingMul(state.resource_cap, spec.reduction_factor);
  if (grown > spec.max_resource) {
    next.resource_cap = spec.max_resource;
    next.top_rung = FloorLogRungs(spec.max_resource, spec);
  } else {
    next.resource_cap = grown;
    next.top_rung = state.top_rung + 1;
  }
  return next;
}

RungLevels::RungLevels(const ResourceSpec& spec) {
  const int rungs = CeilLogRungs(spec.max_resource, spec);
  levels_.reserve(static_cast<std::size_t>(rungs) + 1);
  for (int k = 0; k <= rungs; ++k) {
    levels_.push_back(std::min(RungResource(k, spec), spec.max_resource));
  }
}

int RungLevels::TopRungWithin(Resource cap) const {
  int top = 0;
  for (int k = 0; k < num_rungs(); ++k) {
    if (levels_[static_cast<std::size_t>(k)] <= cap) top = k;
  }
  return top;
}

bool RungLadder::Contains(int k, ConfigId config) const { return Find(k, config) != nullptr; }

const RungEntry* RungLadder::Find(int k, ConfigId config) const {
  for (const RungEntry& e : rung(k)) {
    if (e.config == config) return &e;
  }
  return nullptr;
}

void RungLadder::Insert(int k, RungEntry entry) {
  if (k < 0 || k >= num_rungs()) {
    throw InvariantError("rung index " + std::to_string(k) + " outside ladder");
  }
  if (Contains(k, entry.config)) {
    throw InvariantError("config " + ToString(entry.config) + " already reported at rung " +
                         std::to_string(k));
  }
  if (k > 0) {
    const RungEntry* below = Find(k - 1, entry.config);
    if (below == nullptr || !below->promoted) {
      throw InvariantError("config " + ToString(entry.config) + " inserted at rung " +
                           std::to_string(k) + " without promotion from rung " +
                           std::to_string(k - 1));
    }
  }
  rungs_[static_cast<std::size_t>(k)].push_back(entry);
}

void RungLadder::MarkPromoted(int k, ConfigId config) {
  for (RungEntry& e : rungs_.at(static_cast<std::size_t>(k))) {
    if (e.config == config) {
      if (e.promoted) {
        throw InvariantError("config " + ToString(config) + " promoted twice from rung " +
                             std::to_string(k));
      }
      e.promoted = true;
      return;
    }
  }
  throw InvariantError("config " + ToString(config) + " not present at rung " +
                       std::to_string(k));
}

std::vector<RungEntry> RungLadder::Sorted(int k) const {
  std::vector<RungEntry> sorted = rung(k);
  std::sort(sorted.begin(), sorted.end(), RanksBefore);
  return sorted;
}

int RungLadder::HighestNonEmpty() const {
  for (int k = num_rungs() - 1; k >= 0; --k) {
    if (!rung(k).empty()) return k;
  }
  return -1;
}

void RungLadder::CheckInvariants() const {
  for (int k = 1; k < num_rungs(); ++k) {
    for (const RungEntry& e : rung(k)) {
      const RungEntry* below = Find(k - 1, e.config);
      if (below == nullptr || !below->promoted) {
        throw InvariantError("ladder prefix property violated for config " +
                             ToString(e.config) + " at rung " + std::to_string(k));
      }
    }
  }
}

std::string ToString(ConfigId id) { return std::to_string(id.value); }

}  // namespace pasha
