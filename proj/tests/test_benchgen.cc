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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "pasha/benchgen.h"
#include "pasha/error.h"

using namespace pasha;

namespace {

std::string Saved(const LearningCurveTable& table) {
  std::ostringstream out;
  SaveBenchmark(table, out);
  return out.str();
}

LearningCurveTable Loaded(const std::string& text) {
  std::istringstream in(text);
  return LoadBenchmark(in);
}

CurveRow Row(std::int64_t id, std::vector<double> metric) {
  CurveRow row;
  row.id = id;
  row.cost.assign(metric.size(), 1.0);
  row.metric = std::move(metric);
  return row;
}

LearningCurveTable Table(std::vector<CurveRow> rows) {
  LearningCurveTable table;
  table.units = static_cast<int>(rows.front().metric.size());
  table.rows = std::move(rows);
  return table;
}

// Largest u (1-based) at which some pair is ordered differently than at U.
int LastCrossingBruteForce(const LearningCurveTable& table) {
  int last = 0;
  const auto U = static_cast<std::size_t>(table.units);
  for (std::size_t u = 0; u < U; ++u) {
    for (const CurveRow& a : table.rows) {
      for (const CurveRow& b : table.rows) {
        const bool now = a.metric[u] < b.metric[u];
        const bool end = a.metric[U - 1] < b.metric[U - 1];
        if (now != end) last = std::max(last, static_cast<int>(u + 1));
      }
    }
  }
  return last;
}

double KendallTau(const LearningCurveTable& table, std::size_t u) {
  const auto last = static_cast<std::size_t>(table.units) - 1;
  double concordant = 0.0, discordant = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = i + 1; j < table.size(); ++j) {
      const double x = table.rows[i].metric[u] - table.rows[j].metric[u];
      const double y = table.rows[i].metric[last] - table.rows[j].metric[last];
      if (x * y > 0) concordant += 1;
      if (x * y < 0) discordant += 1;
    }
  }
  const double n = static_cast<double>(table.size());
  return (concordant - discordant) / (n * (n - 1) / 2);
}

}  // namespace

TEST_CASE("noiseless tables never cross after the horizon") {
  for (CurveFamily family : {CurveFamily::kPowerLaw, CurveFamily::kExponentialSaturation}) {
    for (int horizon : {1, 3, 5, 20}) {
      for (std::uint64_t seed : {0u, 1u, 2u}) {
        CurveModel model;
        model.family = family;
        model.crossing_horizon = horizon;
        model.rate = family == CurveFamily::kPowerLaw ? 0.7 : 0.15;
        const LearningCurveTable table = GenerateBenchmark(96, 40, model, seed);
        CAPTURE(horizon);
        CAPTURE(seed);
        CHECK(LastCrossingBruteForce(table) < horizon);
        int reported = 0;
        for (const Crossing& c : CrossingReport(table)) reported = std::max(reported, c.last_crossing);
        CHECK(reported == LastCrossingBruteForce(table));
        for (const CurveRow& row : table.rows) {
          for (std::size_t u = 1; u < row.metric.size(); ++u) CHECK(row.metric[u] > row.metric[u - 1]);
          CHECK(row.final_metric == row.metric.back());
        }
      }
    }
  }
}

TEST_CASE("rank correlation with the final ranking grows with resource") {
  CurveModel model;
  model.crossing_horizon = 12;
  model.amplitude_low = 0.1;
  model.amplitude_high = 0.9;
  const LearningCurveTable table = GenerateBenchmark(120, 40, model, 8);
  double previous = -1.0;
  for (std::size_t u = 0; u < 40; ++u) {
    const double tau = KendallTau(table, u);
    CHECK(tau >= previous - 1e-12);
    previous = tau;
  }
  CHECK(previous == 1.0);
  CHECK(KendallTau(table, 0) < 1.0);
}

TEST_CASE("generation is deterministic") {
  CurveModel model;
  model.noise_std = 0.002;
  model.allow_observed_crossings = true;
  CHECK(Saved(GenerateBenchmark(50, 27, model, 5)) == Saved(GenerateBenchmark(50, 27, model, 5)));
  CHECK(Saved(GenerateBenchmark(50, 27, model, 5)) != Saved(GenerateBenchmark(50, 27, model, 6)));
}

TEST_CASE("invalid models") {
  CurveModel model;
  CHECK_THROWS_AS(GenerateBenchmark(10, 4, model, 0), std::invalid_argument);  // U < horizon
  model.asymptote_low = 0.9;
  model.asymptote_high = 0.5;
  CHECK_THROWS_AS(GenerateBenchmark(10, 10, model, 0), std::invalid_argument);
  model = CurveModel{};
  model.amplitude_high = 1.0;
  CHECK_THROWS_AS(GenerateBenchmark(10, 10, model, 0), std::invalid_argument);
  model = CurveModel{};
  model.noise_std = -1.0;
  CHECK_THROWS_AS(GenerateBenchmark(10, 10, model, 0), std::invalid_argument);
  CHECK_THROWS_AS(ParseCurveFamily("sigmoid"), std::invalid_argument);
}

TEST_CASE("noise that breaks the horizon is an error unless allowed") {
  CurveModel model;
  model.noise_std = 0.05;
  CHECK_THROWS_AS(GenerateBenchmark(200, 40, model, 1), std::invalid_argument);
  model.allow_observed_crossings = true;
  const LearningCurveTable hard = GenerateBenchmark(200, 40, model, 1);
  CHECK(LastCrossingBruteForce(hard) >= model.crossing_horizon);
  // The stored final metric is the latent value, untouched by noise.
  for (const CurveRow& row : hard.rows) CHECK(row.final_metric.has_value());
}

TEST_CASE("save and load round trip") {
  CurveModel model;
  model.noise_std = 0.01;
  model.allow_observed_crossings = true;
  LearningCurveTable table = GenerateBenchmark(40, 9, model, 3);
  CHECK(Loaded(Saved(table)) == table);
  CHECK(Saved(Loaded(Saved(table))) == Saved(table));

  table.direction = MetricDirection::kMinimize;
  table.metric_name = "loss";
  table.resource_unit = "step";
  table.rows[0].payload.clear();
  table.rows[1].final_metric.reset();
  CHECK(Loaded(Saved(table)) == table);
  // Minimized metrics are stored on disk as written and negated in memory.
  const std::string text = Saved(table);
  CHECK(text.find("direction\tminimize") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "pasha_test_roundtrip.tsv";
  SaveBenchmark(table, path);
  CHECK(LoadBenchmark(path) == table);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(LoadBenchmark(path), DataError);
}

TEST_CASE("minimized files are negated on load") {
  const std::string text =
      "pasha-benchmark\t1\nunits\t2\nresource_unit\tepoch\nmetric\tloss\ndirection\tminimize\n"
      "configs\t1\n7\t-\t0.25\t0.5\t0.3\t1\t2\n";
  const LearningCurveTable table = Loaded(text);
  CHECK(table.rows[0].metric == std::vector<double>{-0.5, -0.3});
  CHECK(table.rows[0].final_metric == -0.25);
  CHECK(Saved(table) == text);
}

TEST_CASE("malformed files name the line") {
  const std::string header =
      "pasha-benchmark\t1\nunits\t2\nresource_unit\tepoch\nmetric\tacc\ndirection\tmaximize\n";
  auto error_of = [](const std::string& text) -> std::string {
    try {
      Loaded(text);
    } catch (const DataError& e) {
      return e.what();
    }
    return "";
  };
  const std::string ragged = error_of(header + "configs\t2\n0\t-\t-\t0.1\t0.2\t1\t1\n1\t-\t-\t0.1\t1\t1\n");
  CHECK(ragged.find("line 8") != std::string::npos);
  CHECK(ragged.find("row '1'") != std::string::npos);
  CHECK(error_of(header + "configs\t1\n0\t-\t-\t0.1\tnan\t1\t1\n").find("line 7") != std::string::npos);
  CHECK(error_of(header + "configs\t1\n0\t-\t-\t0.1\tinf\t1\t1\n").find("line 7") != std::string::npos);
  CHECK(error_of(header + "configs\t1\n0\t-\t-\t0.1\t0.2\t1\t0\n").find("line 7") != std::string::npos);
  CHECK_FALSE(error_of(header + "configs\t2\n0\t-\t-\t0.1\t0.2\t1\t1\n").empty());
  CHECK_FALSE(error_of(header + "configs\t2\n0\t-\t-\t0.1\t0.2\t1\t1\n0\t-\t-\t0.1\t0.2\t1\t1\n").empty());
  CHECK(error_of("pasha-benchmark\t2\n").find("line 1") != std::string::npos);
  CHECK(error_of("id,metric\n").find("line 1") != std::string::npos);
  CHECK_FALSE(error_of("").empty());
  CHECK(error_of("pasha-benchmark\t1\nunits\t2\nresource\tepoch\n").find("line 3") != std::string::npos);
}

TEST_CASE("tied curves load fine") {
  const LearningCurveTable table = Table({Row(0, {0.1, 0.2}), Row(1, {0.1, 0.2})});
  CHECK(Loaded(Saved(table)) == table);
  CHECK(CrossingReport(table).empty());
}

TEST_CASE("crossing report on hand-made tables") {
  CHECK(CrossingReport(Table({Row(0, {0.3, 0.3, 0.3}), Row(1, {0.6, 0.6, 0.6})})).empty());
  const LearningCurveTable late =
      Table({Row(0, {0.5, 0.5, 0.5, 0.9, 0.5}), Row(1, {0.6, 0.6, 0.6, 0.6, 0.6})});
  CHECK(CrossingReport(late) == std::vector<Crossing>{{0, 1, 4}});
  const LearningCurveTable early =
      Table({Row(3, {0.9, 0.1, 0.1}), Row(5, {0.5, 0.5, 0.5}), Row(9, {0.2, 0.3, 0.4})});
  CHECK(CrossingReport(early) == std::vector<Crossing>{{3, 5, 1}, {3, 9, 1}});
}

TEST_CASE("missing rows are imputed from the other seeds") {
  LearningCurveTable a = Table({Row(0, {0.1, 0.2}), Row(1, {0.3, 0.4})});
  LearningCurveTable b = Table({Row(1, {0.5, 0.6})});
  LearningCurveTable c = Table({Row(0, {0.3, 0.4}), Row(1, {0.1, 0.2})});
  a.rows[0].final_metric = 0.2;
  c.rows[0].final_metric = 0.6;
  const auto out = ImputeMissingRows({a, b, c});
  REQUIRE(out[1].rows.size() == 2);
  CHECK(out[1].rows[0].id == 0);
  CHECK(out[1].rows[0].metric[0] == doctest::Approx(0.2));
  CHECK(out[1].rows[0].metric[1] == doctest::Approx(0.3));
  CHECK(out[1].rows[0].final_metric == doctest::Approx(0.4));
  CHECK(out[1].rows[1] == b.rows[0]);
  CHECK(out[0] == a);

  LearningCurveTable wrong = b;
  wrong.units = 3;
  for (auto& row : wrong.rows) {
    row.metric.push_back(0.7);
    row.cost.push_back(1.0);
  }
  CHECK_THROWS_AS(ImputeMissingRows({a, wrong}), DataError);
}
