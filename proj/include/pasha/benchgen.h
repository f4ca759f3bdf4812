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

// Synthetic tabulated benchmarks and the on-disk benchmark format.
//
// Generated curves follow metric(u) = a - b * g(u) with a per-config
// asymptote a, amplitude b and a shared decay g (g(1) = 1, decreasing to 0).
// Two such curves cross at most once, so fixing the order of the curves at
// the crossing horizon R* fixes it for every u >= R*. The generator draws
// amplitudes freely and then raises those that would cross after R*.
//
// File format (tab separated, one record per line):
//
//   pasha-benchmark  1
//   units            <U>
//   resource_unit    <label>
//   metric           <name>
//   direction        maximize|minimize
//   configs          <n>
//   <id> <payload|-> <final|-> <metric_1> .. <metric_U> <cost_1> .. <cost_U>
//
// Reals are written in shortest round-trip form, so save followed by load
// reproduces the table exactly.

#ifndef PASHA_BENCHGEN_H_
#define PASHA_BENCHGEN_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pasha/curve_table.h"

namespace pasha {

enum class CurveFamily { kPowerLaw, kExponentialSaturation };

std::string_view CurveFamilyName(CurveFamily family);
CurveFamily ParseCurveFamily(std::string_view text);

struct CurveModel {
  CurveFamily family = CurveFamily::kPowerLaw;
  // Asymptotes are hi - (hi - lo) * (1 - q)^top_spread with q ~ U(0, 1).
  // top_spread < 1 thins out the best configurations.
  double asymptote_low = 0.10;
  double asymptote_high = 0.95;
  double top_spread = 0.25;
  // Amplitude b = a * s with s ~ U(low, high). A wider range produces more
  // early crossings.
  double amplitude_low = 0.3;
  double amplitude_high = 0.8;
  // Decay exponent (power law) or rate (exponential saturation).
  double rate = 0.7;
  double noise_std = 0.0;
  int crossing_horizon = 5;
  // Permit observation noise to create crossings after the horizon. When
  // false and noise produces one, generation fails.
  bool allow_observed_crossings = false;
  // Seconds per resource unit, drawn once per config.
  double cost_low = 30.0;
  double cost_high = 120.0;

  void Validate() const;
};

// Decay g(u) of the family at `rate`.
double CurveDecay(CurveFamily family, double rate, double u);

// Throws std::invalid_argument for infeasible settings.
LearningCurveTable GenerateBenchmark(std::size_t num_configs, int units, const CurveModel& model,
                                     std::uint64_t seed);

void SaveBenchmark(const LearningCurveTable& table, std::ostream& out);
void SaveBenchmark(const LearningCurveTable& table, const std::filesystem::path& path);
// Throws DataError with the offending line number.
LearningCurveTable LoadBenchmark(std::istream& in);
LearningCurveTable LoadBenchmark(const std::filesystem::path& path);

struct Crossing {
  std::int64_t first = 0;   // config ids
  std::int64_t second = 0;
  int last_crossing = 0;    // largest u where the pair's order differs from u = U
  friend bool operator==(const Crossing&, const Crossing&) = default;
};

// Pairs whose order at some u differs from the order at U. Empty means the
// ranking never changes.
std::vector<Crossing> CrossingReport(const LearningCurveTable& table);

// Multi-seed benchmarks: every table gets a row for the union of config ids;
// a row missing from one seed is the element-wise mean of the seeds that
// have it. Rows come out sorted by id. Throws DataError if headers disagree.
std::vector<LearningCurveTable> ImputeMissingRows(std::vector<LearningCurveTable> seeds);

}  // namespace pasha

#endif  // PASHA_BENCHGEN_H_
