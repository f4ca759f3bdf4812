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

#include "pasha/curve_table.h"

#include <cmath>
#include <string>

#include "pasha/error.h"

namespace pasha {
namespace {

void CheckResource(const LearningCurveTable& table, std::size_t row, Resource resource) {
  if (row >= table.rows.size()) {
    throw DataError("benchmark has no row " + std::to_string(row));
  }
  if (resource < 1 || resource > table.units) {
    throw DataError("config " + std::to_string(table.rows[row].id) + " needs resource " +
                    std::to_string(resource) + " but its curve covers 1.." +
                    std::to_string(table.units));
  }
}

}  // namespace

double LearningCurveTable::MetricAt(std::size_t row, Resource resource) const {
  CheckResource(*this, row, resource);
  return rows[row].metric[static_cast<std::size_t>(resource - 1)];
}

double LearningCurveTable::CostBetween(std::size_t row, Resource from, Resource to) const {
  CheckResource(*this, row, to);
  double seconds = 0.0;
  for (Resource u = from + 1; u <= to; ++u) seconds += rows[row].cost[static_cast<std::size_t>(u - 1)];
  return seconds;
}

double LearningCurveTable::FullFidelityMetric(std::size_t row) const {
  const CurveRow& r = rows.at(row);
  if (r.final_metric) return *r.final_metric;
  return r.metric.back();
}

void LearningCurveTable::Validate() const {
  if (units < 1) throw DataError("benchmark must have at least one resource unit");
  for (const CurveRow& row : rows) {
    const std::string where = "config " + std::to_string(row.id);
    if (row.metric.size() != static_cast<std::size_t>(units) ||
        row.cost.size() != static_cast<std::size_t>(units)) {
      throw DataError(where + ": expected " + std::to_string(units) +
                      " metric and cost values");
    }
    for (double m : row.metric) {
      if (!std::isfinite(m)) throw DataError(where + ": non-finite metric");
    }
    for (double c : row.cost) {
      if (!std::isfinite(c) || c <= 0.0) throw DataError(where + ": costs must be positive");
    }
    if (row.final_metric && !std::isfinite(*row.final_metric)) {
      throw DataError(where + ": non-finite final metric");
    }
  }
}

}  // namespace pasha
