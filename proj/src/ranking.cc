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

#include "pasha/ranking.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "pasha/error.h"
#include "pasha/format.h"

namespace pasha {
namespace {

bool ItemRanksBefore(const RankedItem& a, const RankedItem& b) {
  if (a.metric != b.metric) return a.metric > b.metric;
  return a.completion_index < b.completion_index;
}

std::unordered_map<ConfigId, double> MetricIndex(const RankedList& list) {
  std::unordered_map<ConfigId, double> index;
  index.reserve(list.size());
  for (const RankedItem& item : list.items()) index.emplace(item.config, item.metric);
  return index;
}

// Metrics of `top` listed in the order given by `below_order`.
std::vector<double> ReorderedMetrics(const RankedList& top,
                                     std::span<const ConfigId> below_order) {
  if (below_order.size() != top.size()) {
    throw std::invalid_argument("regret: orderings differ in length");
  }
  const auto index = MetricIndex(top);
  std::unordered_set<ConfigId> seen;
  std::vector<double> reordered;
  reordered.reserve(below_order.size());
  for (ConfigId id : below_order) {
    const auto it = index.find(id);
    if (it == index.end() || !seen.insert(id).second) {
      throw std::invalid_argument("regret: lower ordering is not a permutation of the top rung");
    }
    reordered.push_back(it->second);
  }
  return reordered;
}

double Regret(const RankedList& top, std::span<const ConfigId> below_order, double p,
              bool absolute) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("regret: p must be in (0, 1]");
  const std::vector<double> reordered = ReorderedMetrics(top, below_order);
  const std::size_t n = top.size();
  double norm = 0.0;
  double weight = 1.0;
  for (std::size_t i = 0; i < n; ++i, weight *= p) norm += weight;
  double score = 0.0;
  weight = 1.0;
  for (std::size_t i = 0; i < n; ++i, weight *= p) {
    const double f = top[i].metric;
    if (!(f > 0.0)) throw std::domain_error("regret: top-rung metrics must be positive");
    const double diff = absolute ? std::abs(f - reordered[i]) : f - reordered[i];
    score += diff / f * (weight / norm);
  }
  return score;
}

double ParseNumber(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("ranking '" + std::string(context) + "': bad number '" +
                                std::string(text) + "'");
  }
  return value;
}

// Parses "p=<x>,t=<y>" in either order.
std::pair<double, double> ParsePThreshold(std::string_view args, std::string_view context) {
  double p = -1.0;
  double t = -1.0;
  while (!args.empty()) {
    const std::size_t comma = args.find(',');
    const std::string_view part = args.substr(0, comma);
    const std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("ranking '" + std::string(context) + "': expected key=value");
    }
    const std::string_view key = part.substr(0, eq);
    const double value = ParseNumber(part.substr(eq + 1), context);
    if (key == "p") {
      p = value;
    } else if (key == "t") {
      t = value;
    } else {
      throw std::invalid_argument("ranking '" + std::string(context) + "': unknown key '" +
                                  std::string(key) + "'");
    }
    args = comma == std::string_view::npos ? std::string_view() : args.substr(comma + 1);
  }
  if (p < 0.0 || t < 0.0) {
    throw std::invalid_argument("ranking '" + std::string(context) + "': needs p= and t=");
  }
  return {p, t};
}

}  // namespace

RankedList::RankedList(std::vector<RankedItem> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end(), ItemRanksBefore);
}

RankedList RankedList::FromEntries(std::span<const RungEntry> entries) {
  std::vector<RankedItem> items;
  items.reserve(entries.size());
  for (const RungEntry& e : entries) items.push_back({e.config, e.metric, e.completion_index});
  return RankedList(std::move(items));
}

std::vector<ConfigId> RankedList::Order() const {
  std::vector<ConfigId> order;
  order.reserve(items_.size());
  for (const RankedItem& item : items_) order.push_back(item.config);
  return order;
}

std::vector<double> RankedList::Metrics() const {
  std::vector<double> metrics;
  metrics.reserve(items_.size());
  for (const RankedItem& item : items_) metrics.push_back(item.metric);
  return metrics;
}

RankedList RankedList::ProjectOnto(const RankedList& keep) const {
  std::unordered_set<ConfigId> wanted;
  for (const RankedItem& item : keep.items()) wanted.insert(item.config);
  RankedList projected;
  projected.items_.reserve(keep.size());
  for (const RankedItem& item : items_) {
    if (wanted.erase(item.config) > 0) projected.items_.push_back(item);
  }
  if (!wanted.empty()) {
    throw InvariantError("config " + ToString(*wanted.begin()) +
                         " is in the top rung but missing from the rung below");
  }
  return projected;
}

SoftRank ComputeSoftRank(const RankedList& list, double epsilon) {
  SoftRank soft;
  soft.positions.resize(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = 0; j < list.size(); ++j) {
      if (std::abs(list[i].metric - list[j].metric) <= epsilon) {
        soft.positions[i].push_back(list[j].config);
      }
    }
  }
  return soft;
}

bool IsStableSoft(const RankedList& top, const RankedList& below, double epsilon) {
  const RankedList projected = below.ProjectOnto(top);
  if (top.size() <= 1) return true;
  const auto below_metric = MetricIndex(projected);
  for (std::size_t i = 0; i < top.size(); ++i) {
    // top[i] belongs to soft rank position i of the projected lower rung.
    const double at_position = projected[i].metric;
    if (std::abs(at_position - below_metric.at(top[i].config)) > epsilon) return false;
  }
  return true;
}

bool IsStableDirect(const RankedList& top, const RankedList& below) {
  return IsStableSoft(top, below, 0.0);
}

double EpsilonSigma(const RankedList& below, double multiplier) {
  if (below.size() < 2) return 0.0;
  double mean = 0.0;
  for (const RankedItem& item : below.items()) mean += item.metric;
  mean /= static_cast<double>(below.size());
  double sum_sq = 0.0;
  for (const RankedItem& item : below.items()) sum_sq += (item.metric - mean) * (item.metric - mean);
  return multiplier * std::sqrt(sum_sq / static_cast<double>(below.size()));
}

double EpsilonMeanDistance(const RankedList& below) {
  if (below.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < below.size(); ++i) total += below[i].metric - below[i + 1].metric;
  return total / static_cast<double>(below.size() - 1);
}

double EpsilonMedianDistance(const RankedList& below) {
  if (below.size() < 2) return 0.0;
  std::vector<double> gaps;
  gaps.reserve(below.size() - 1);
  for (std::size_t i = 0; i + 1 < below.size(); ++i) gaps.push_back(below[i].metric - below[i + 1].metric);
  std::sort(gaps.begin(), gaps.end());
  const std::size_t mid = gaps.size() / 2;
  if (gaps.size() % 2 == 1) return gaps[mid];
  return 0.5 * (gaps[mid - 1] + gaps[mid]);
}

double RankBiasedOverlap(std::span<const ConfigId> top_order,
                         std::span<const ConfigId> below_order, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("rbo: p must be in (0, 1]");
  const std::size_t n = top_order.size();
  if (n == 0 || below_order.size() != n) {
    throw std::invalid_argument("rbo: orderings must be non-empty and of equal length");
  }
  {
    std::unordered_set<ConfigId> a(top_order.begin(), top_order.end());
    std::unordered_set<ConfigId> b(below_order.begin(), below_order.end());
    if (a.size() != n || a != b) throw std::invalid_argument("rbo: orderings differ in config set");
  }
  std::unordered_set<ConfigId> seen_top;
  std::unordered_set<ConfigId> seen_below;
  std::size_t overlap = 0;
  const double norm = p < 1.0 ? (1.0 - std::pow(p, static_cast<double>(n))) : 1.0;
  double score = 0.0;
  double decay = 1.0;  // p^{d-1}
  for (std::size_t d = 1; d <= n; ++d, decay *= p) {
    const ConfigId x = top_order[d - 1];
    const ConfigId y = below_order[d - 1];
    if (x == y) {
      ++overlap;
    } else {
      if (seen_below.contains(x)) ++overlap;
      if (seen_top.contains(y)) ++overlap;
    }
    seen_top.insert(x);
    seen_below.insert(y);
    const double agreement = static_cast<double>(overlap) / static_cast<double>(d);
    if (p < 1.0) {
      score += (1.0 - p) * decay / norm * agreement;
    } else {
      score += agreement / static_cast<double>(n);
    }
  }
  return score;
}

double ReciprocalRankRegret(const RankedList& top, std::span<const ConfigId> below_order,
                            double p) {
  return Regret(top, below_order, p, /*absolute=*/false);
}

double AbsoluteReciprocalRankRegret(const RankedList& top,
                                    std::span<const ConfigId> below_order, double p) {
  return Regret(top, below_order, p, /*absolute=*/true);
}

void Validate(const RankingCriterion& criterion) {
  auto check_p_t = [](double p, double t) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("ranking: p must be in (0, 1]");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("ranking: threshold must be in [0, 1]");
  };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SoftRanking>) {
          if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) {
            throw std::invalid_argument("ranking: epsilon must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, SoftSigma>) {
          if (c.multiplier != 1.0 && c.multiplier != 2.0 && c.multiplier != 3.0) {
            throw std::invalid_argument("ranking: sigma multiplier must be 1, 2 or 3");
          }
        } else if constexpr (std::is_same_v<T, RboCriterion> ||
                             std::is_same_v<T, RegretCriterion>) {
          check_p_t(c.p, c.threshold);
        }
      },
      criterion);
}

bool IsStable(const RankingCriterion& criterion, const RankedList& top, const RankedList& below) {
  const RankedList projected = below.ProjectOnto(top);
  if (top.size() <= 1) return true;
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, DirectRanking>) {
          return IsStableSoft(top, projected, 0.0);
        } else if constexpr (std::is_same_v<T, SoftRanking>) {
          return IsStableSoft(top, projected, c.epsilon);
        } else if constexpr (std::is_same_v<T, SoftSigma>) {
          return IsStableSoft(top, projected, EpsilonSigma(projected, c.multiplier));
        } else if constexpr (std::is_same_v<T, SoftMeanDistance>) {
          return IsStableSoft(top, projected, EpsilonMeanDistance(projected));
        } else if constexpr (std::is_same_v<T, SoftMedianDistance>) {
          return IsStableSoft(top, projected, EpsilonMedianDistance(projected));
        } else if constexpr (std::is_same_v<T, RboCriterion>) {
          const std::vector<ConfigId> a = top.Order();
          const std::vector<ConfigId> b = projected.Order();
          return RankBiasedOverlap(a, b, c.p) >= c.threshold;
        } else if constexpr (std::is_same_v<T, RegretCriterion>) {
          const std::vector<ConfigId> b = projected.Order();
          const double score = c.absolute ? AbsoluteReciprocalRankRegret(top, b, c.p)
                                          : ReciprocalRankRegret(top, b, c.p);
          return score <= c.threshold;
        } else {
          return false;
        }
      },
      criterion);
}

RankingCriterion ParseCriterion(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
  const bool has_args = colon != std::string_view::npos;
  auto no_args = [&]() {
    if (has_args) {
      throw std::invalid_argument("ranking '" + std::string(text) + "' takes no arguments");
    }
  };
  RankingCriterion criterion;
  if (name == "direct") {
    no_args();
    criterion = DirectRanking{};
  } else if (name == "soft") {
    criterion = SoftRanking{has_args ? ParseNumber(args, text) : 0.025};
  } else if (name == "soft-sigma") {
    criterion = SoftSigma{has_args ? ParseNumber(args, text) : 2.0};
  } else if (name == "soft-mean-dist") {
    no_args();
    criterion = SoftMeanDistance{};
  } else if (name == "soft-median-dist") {
    no_args();
    criterion = SoftMedianDistance{};
  } else if (name == "rbo") {
    const auto [p, t] = ParsePThreshold(args, text);
    criterion = RboCriterion{p, t};
  } else if (name == "rrr" || name == "arrr") {
    const auto [p, t] = ParsePThreshold(args, text);
    criterion = RegretCriterion{p, t, name == "arrr"};
  } else if (name == "never-stable") {
    no_args();
    criterion = NeverStable{};
  } else {
    throw std::invalid_argument("unknown ranking '" + std::string(text) + "'");
  }
  Validate(criterion);
  return criterion;
}

std::string ToString(const RankingCriterion& criterion) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, DirectRanking>) {
          return "direct";
        } else if constexpr (std::is_same_v<T, SoftRanking>) {
          return "soft:" + FormatShortest(c.epsilon);
        } else if constexpr (std::is_same_v<T, SoftSigma>) {
          return "soft-sigma:" + FormatShortest(c.multiplier);
        } else if constexpr (std::is_same_v<T, SoftMeanDistance>) {
          return "soft-mean-dist";
        } else if constexpr (std::is_same_v<T, SoftMedianDistance>) {
          return "soft-median-dist";
        } else if constexpr (std::is_same_v<T, RboCriterion>) {
          return "rbo:p=" + FormatShortest(c.p) + ",t=" + FormatShortest(c.threshold);
        } else if constexpr (std::is_same_v<T, RegretCriterion>) {
          return std::string(c.absolute ? "arrr" : "rrr") + ":p=" + FormatShortest(c.p) +
                 ",t=" + FormatShortest(c.threshold);
        } else {
          return "never-stable";
        }
      },
      criterion);
}

}  // namespace pasha
