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

#ifndef PASHA_CURVE_TABLE_H_
#define PASHA_CURVE_TABLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pasha/core.h"

namespace pasha {

enum class MetricDirection { kMaximize, kMinimize };

// One tabulated configuration. metric[u-1] is the validation metric after u
// resource units and cost[u-1] the wall-clock seconds spent on unit u.
// Metrics are always stored larger-is-better; minimized metrics are negated
// when a file is loaded and negated back when it is saved.
struct CurveRow {
  std::int64_t id = 0;
  std::string payload;  // free-form hyperparameter description, may be empty
  std::vector<double> metric;
  std::vector<double> cost;
  std::optional<double> final_metric;

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

struct LearningCurveTable {
  int units = 0;
  std::string resource_unit = "epoch";
  std::string metric_name = "accuracy";
  MetricDirection direction = MetricDirection::kMaximize;
  std::vector<CurveRow> rows;

  std::size_t size() const { return rows.size(); }

  // Metric after `resource` units. Throws DataError naming the row and
  // resource when the curve is too short.
  double MetricAt(std::size_t row, Resource resource) const;

  // Seconds to continue training from `from` units to `to` units.
  double CostBetween(std::size_t row, Resource from, Resource to) const;

  // The re-trained full-fidelity metric when the table carries one,
  // otherwise the last point of the curve.
  double FullFidelityMetric(std::size_t row) const;

  // Throws DataError if row lengths disagree with `units`, a value is
  // non-finite, or a cost is not positive.
  void Validate() const;

  friend bool operator==(const LearningCurveTable&, const LearningCurveTable&) = default;
};

}  // namespace pasha

#endif  // PASHA_CURVE_TABLE_H_
