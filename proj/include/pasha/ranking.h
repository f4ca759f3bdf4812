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

// Rank construction and rank-stability criteria used by PASHA to decide
// whether the top two rungs agree: direct ranking, soft ranking with a fixed
// or data-driven epsilon, rank-biased overlap and (absolute) reciprocal rank
// regret.
//
// Every check compares the top rung against the rung beneath it after
// restricting the lower rung to the configs present in the top rung
// (relative order preserved). Top rungs with fewer than two configs carry no
// ordering information and are always reported stable.

#ifndef PASHA_RANKING_H_
#define PASHA_RANKING_H_

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pasha/core.h"

namespace pasha {

struct RankedItem {
  ConfigId config;
  double metric = 0.0;
  std::uint64_t completion_index = 0;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

// Configs sorted by metric descending, ties by completion index ascending.
class RankedList {
 public:
  RankedList() = default;
  // Sorts the given items.
  explicit RankedList(std::vector<RankedItem> items);
  static RankedList FromEntries(std::span<const RungEntry> entries);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const RankedItem& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<RankedItem>& items() const { return items_; }

  std::vector<ConfigId> Order() const;
  std::vector<double> Metrics() const;

  // The sub-list of configs present in `keep`, order preserved. Throws
  // InvariantError if a config of `keep` is missing here.
  RankedList ProjectOnto(const RankedList& keep) const;

 private:
  std::vector<RankedItem> items_;
};

// positions[i] holds every config whose metric is within epsilon of the
// metric at rank i (inclusive), in rank order.
struct SoftRank {
  std::vector<std::vector<ConfigId>> positions;
};

SoftRank ComputeSoftRank(const RankedList& list, double epsilon);

bool IsStableSoft(const RankedList& top, const RankedList& below, double epsilon);
bool IsStableDirect(const RankedList& top, const RankedList& below);

// Adaptive epsilon heuristics over a (projected) lower-rung list. Fewer than
// two entries yield 0.
double EpsilonSigma(const RankedList& below, double multiplier);
double EpsilonMeanDistance(const RankedList& below);
double EpsilonMedianDistance(const RankedList& below);

// Rank-biased overlap of two orderings of the same config set, truncated at
// depth n with weights renormalized; p == 1 gives the average overlap.
double RankBiasedOverlap(std::span<const ConfigId> top_order,
                         std::span<const ConfigId> below_order, double p);

// Reciprocal rank regret: relative metric loss (measured on the top rung)
// incurred by trusting `below_order` instead of the top rung's own order.
// May be negative. Throws std::domain_error if a top metric is <= 0.
double ReciprocalRankRegret(const RankedList& top, std::span<const ConfigId> below_order,
                            double p);
double AbsoluteReciprocalRankRegret(const RankedList& top,
                                    std::span<const ConfigId> below_order, double p);

struct DirectRanking {};
struct SoftRanking {
  double epsilon = 0.025;
};
struct SoftSigma {
  double multiplier = 2.0;
};
struct SoftMeanDistance {};
struct SoftMedianDistance {};
struct RboCriterion {
  double p = 0.5;
  double threshold = 0.5;
};
struct RegretCriterion {
  double p = 0.5;
  double threshold = 0.05;
  bool absolute = false;
};
// Reports every non-degenerate comparison as unstable. With it PASHA grows
// as fast as it can, which makes it a reference point against ASHA.
struct NeverStable {};

using RankingCriterion = std::variant<DirectRanking, SoftRanking, SoftSigma, SoftMeanDistance,
                                      SoftMedianDistance, RboCriterion, RegretCriterion,
                                      NeverStable>;

// Throws std::invalid_argument on out-of-range parameters.
void Validate(const RankingCriterion& criterion);

bool IsStable(const RankingCriterion& criterion, const RankedList& top, const RankedList& below);

// Parses the textual spelling: "direct", "soft:0.025", "soft-sigma:2",
// "soft-mean-dist", "soft-median-dist", "rbo:p=0.5,t=0.5", "rrr:p=0.5,t=0.05",
// "arrr:p=1.0,t=0.05", "never-stable". Throws std::invalid_argument.
RankingCriterion ParseCriterion(std::string_view text);
std::string ToString(const RankingCriterion& criterion);

}  // namespace pasha

#endif  // PASHA_RANKING_H_
