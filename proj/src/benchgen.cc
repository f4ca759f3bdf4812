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

#include "pasha/benchgen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "pasha/error.h"
#include "pasha/format.h"

namespace pasha {
namespace {

constexpr std::string_view kMagic = "pasha-benchmark";
constexpr int kFormatVersion = 1;

int Sign(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

[[noreturn]] void ParseFailure(std::size_t line_no, const std::string& message) {
  throw DataError("benchmark line " + std::to_string(line_no) + ": " + message);
}

double ParseFinite(std::string_view text, std::size_t line_no, std::string_view what) {
  const auto value = ParseDouble(text);
  if (!value || !std::isfinite(*value)) {
    ParseFailure(line_no, "bad " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return *value;
}

}  // namespace

std::string_view CurveFamilyName(CurveFamily family) {
  return family == CurveFamily::kPowerLaw ? "power-law" : "exp-saturation";
}

CurveFamily ParseCurveFamily(std::string_view text) {
  if (text == "power-law" || text == "power_law") return CurveFamily::kPowerLaw;
  if (text == "exp-saturation" || text == "exponential_saturation") {
    return CurveFamily::kExponentialSaturation;
  }
  throw std::invalid_argument("unknown curve family '" + std::string(text) + "'");
}

void CurveModel::Validate() const {
  if (!(asymptote_low < asymptote_high) || !(asymptote_low > 0.0)) {
    throw std::invalid_argument("curve model: need 0 < asymptote_low < asymptote_high");
  }
  if (!(top_spread > 0.0)) throw std::invalid_argument("curve model: top_spread must be > 0");
  if (!(amplitude_low > 0.0) || !(amplitude_low <= amplitude_high) || !(amplitude_high < 1.0)) {
    throw std::invalid_argument("curve model: need 0 < amplitude_low <= amplitude_high < 1");
  }
  if (!(rate > 0.0)) throw std::invalid_argument("curve model: rate must be > 0");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("curve model: noise_std must be >= 0");
  if (crossing_horizon < 1) throw std::invalid_argument("curve model: crossing_horizon must be >= 1");
  if (!(cost_low > 0.0) || !(cost_low <= cost_high)) {
    throw std::invalid_argument("curve model: need 0 < cost_low <= cost_high");
  }
}

double CurveDecay(CurveFamily family, double rate, double u) {
  if (family == CurveFamily::kPowerLaw) return std::pow(u, -rate);
  return std::exp(-rate * (u - 1.0));
}

LearningCurveTable GenerateBenchmark(std::size_t num_configs, int units, const CurveModel& model,
                                     std::uint64_t seed) {
  model.Validate();
  if (units < model.crossing_horizon) {
    throw std::invalid_argument("units must be >= crossing_horizon");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> amplitude(model.amplitude_low, model.amplitude_high);
  std::uniform_real_distribution<double> cost(model.cost_low, model.cost_high);

  std::vector<double> asymptote(num_configs);
  std::vector<double> amp(num_configs);
  std::vector<double> unit_cost(num_configs);
  const double span = model.asymptote_high - model.asymptote_low;
  for (std::size_t i = 0; i < num_configs; ++i) {
    asymptote[i] = model.asymptote_high - span * std::pow(1.0 - unit(rng), model.top_spread);
    amp[i] = asymptote[i] * amplitude(rng);
    unit_cost[i] = cost(rng);
  }

  // Walk the configs from best to worst asymptote and raise any amplitude
  // whose curve would still be above its predecessor's at the horizon.
  std::vector<std::size_t> order(num_configs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return asymptote[x] > asymptote[y]; });
  const double decay_at_horizon =
      CurveDecay(model.family, model.rate, static_cast<double>(model.crossing_horizon));
  double prev_value = std::numeric_limits<double>::infinity();
  double prev_asymptote = std::numeric_limits<double>::infinity();
  double prev_amp = 0.0;
  for (std::size_t i : order) {
    if (asymptote[i] == prev_asymptote) {
      amp[i] = prev_amp;
    } else {
      double value = asymptote[i] - amp[i] * decay_at_horizon;
      if (value >= prev_value) {
        const double target = prev_value - 1e-9;
        amp[i] = (asymptote[i] - target) / decay_at_horizon;
        while (asymptote[i] - amp[i] * decay_at_horizon >= prev_value) {
          amp[i] = std::nextafter(amp[i], std::numeric_limits<double>::infinity());
        }
      }
      if (amp[i] >= asymptote[i]) {
        throw std::invalid_argument(
            "curve model infeasible: keeping curves ordered after the crossing horizon would "
            "push early metrics to zero; widen the asymptote range or raise the horizon");
      }
    }
    prev_value = asymptote[i] - amp[i] * decay_at_horizon;
    prev_asymptote = asymptote[i];
    prev_amp = amp[i];
  }

  LearningCurveTable table;
  table.units = units;
  table.rows.resize(num_configs);
  std::normal_distribution<double> noise(0.0, model.noise_std > 0.0 ? model.noise_std : 1.0);
  for (std::size_t i = 0; i < num_configs; ++i) {
    CurveRow& row = table.rows[i];
    row.id = static_cast<std::int64_t>(i);
    row.payload = "asymptote=" + FormatShortest(asymptote[i]) +
                  ";amplitude=" + FormatShortest(amp[i]);
    row.metric.resize(static_cast<std::size_t>(units));
    row.cost.assign(static_cast<std::size_t>(units), unit_cost[i]);
    for (int u = 1; u <= units; ++u) {
      double m = asymptote[i] - amp[i] * CurveDecay(model.family, model.rate, u);
      if (model.noise_std > 0.0) m += noise(rng);
      row.metric[static_cast<std::size_t>(u - 1)] = m;
    }
    row.final_metric = asymptote[i] - amp[i] * CurveDecay(model.family, model.rate, units);
  }

  if (model.noise_std > 0.0 && !model.allow_observed_crossings) {
    for (const Crossing& c : CrossingReport(table)) {
      if (c.last_crossing >= model.crossing_horizon) {
        throw std::invalid_argument(
            "observation noise creates a crossing after the horizon (configs " +
            std::to_string(c.first) + ", " + std::to_string(c.second) + " at u=" +
            std::to_string(c.last_crossing) + "); allow observed crossings or lower the noise");
      }
    }
  }
  return table;
}

void SaveBenchmark(const LearningCurveTable& table, std::ostream& out) {
  table.Validate();
  const double sign = table.direction == MetricDirection::kMinimize ? -1.0 : 1.0;
  out << kMagic << '\t' << kFormatVersion << '\n';
  out << "units\t" << table.units << '\n';
  out << "resource_unit\t" << table.resource_unit << '\n';
  out << "metric\t" << table.metric_name << '\n';
  out << "direction\t"
      << (table.direction == MetricDirection::kMinimize ? "minimize" : "maximize") << '\n';
  out << "configs\t" << table.rows.size() << '\n';
  for (const CurveRow& row : table.rows) {
    if (row.payload.find_first_of("\t\n") != std::string::npos) {
      throw DataError("config " + std::to_string(row.id) + ": payload contains a tab or newline");
    }
    out << row.id << '\t' << (row.payload.empty() ? "-" : row.payload) << '\t'
        << (row.final_metric ? FormatShortest(sign * *row.final_metric) : "-");
    for (double m : row.metric) out << '\t' << FormatShortest(sign * m);
    for (double c : row.cost) out << '\t' << FormatShortest(c);
    out << '\n';
  }
}

void SaveBenchmark(const LearningCurveTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  SaveBenchmark(table, out);
  if (!out) throw DataError("failed writing " + path.string());
}

LearningCurveTable LoadBenchmark(std::istream& in) {
  LearningCurveTable table;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  };

  if (!next_line()) throw DataError("benchmark is empty");
  {
    const auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[0] != kMagic) ParseFailure(line_no, "missing pasha-benchmark header");
    if (ParseInteger(fields[1]) != kFormatVersion) {
      ParseFailure(line_no, "unsupported format version '" + std::string(fields[1]) + "'");
    }
  }

  std::map<std::string, std::string, std::less<>> header;
  for (std::string_view key : {"units", "resource_unit", "metric", "direction", "configs"}) {
    if (!next_line()) ParseFailure(line_no + 1, "header ends before '" + std::string(key) + "'");
    const auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[0] != key) {
      ParseFailure(line_no, "expected header field '" + std::string(key) + "'");
    }
    header.emplace(std::string(key), std::string(fields[1]));
  }
  const auto units = ParseInteger(header["units"]);
  if (!units || *units < 1) ParseFailure(2, "units must be a positive integer");
  table.units = static_cast<int>(*units);
  table.resource_unit = header["resource_unit"];
  table.metric_name = header["metric"];
  if (header["direction"] == "maximize") {
    table.direction = MetricDirection::kMaximize;
  } else if (header["direction"] == "minimize") {
    table.direction = MetricDirection::kMinimize;
  } else {
    ParseFailure(5, "direction must be maximize or minimize");
  }
  const auto count = ParseInteger(header["configs"]);
  if (!count || *count < 0) ParseFailure(6, "configs must be a non-negative integer");

  const double sign = table.direction == MetricDirection::kMinimize ? -1.0 : 1.0;
  const std::size_t expected_fields = 3 + 2 * static_cast<std::size_t>(table.units);
  std::vector<std::int64_t> ids;
  table.rows.reserve(static_cast<std::size_t>(*count));
  while (next_line()) {
    if (Trim(line).empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != expected_fields) {
      ParseFailure(line_no, "row '" + std::string(fields[0]) + "' has " +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(expected_fields));
    }
    CurveRow row;
    const auto id = ParseInteger(fields[0]);
    if (!id) ParseFailure(line_no, "bad config id '" + std::string(fields[0]) + "'");
    row.id = *id;
    row.payload = fields[1] == "-" ? std::string() : std::string(fields[1]);
    if (fields[2] != "-") row.final_metric = sign * ParseFinite(fields[2], line_no, "final metric");
    const auto u = static_cast<std::size_t>(table.units);
    row.metric.reserve(u);
    row.cost.reserve(u);
    for (std::size_t i = 0; i < u; ++i) row.metric.push_back(sign * ParseFinite(fields[3 + i], line_no, "metric"));
    for (std::size_t i = 0; i < u; ++i) {
      const double c = ParseFinite(fields[3 + u + i], line_no, "cost");
      if (c <= 0.0) ParseFailure(line_no, "costs must be positive");
      row.cost.push_back(c);
    }
    ids.push_back(row.id);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.size() != static_cast<std::size_t>(*count)) {
    throw DataError("benchmark declares " + std::to_string(*count) + " configs but has " +
                    std::to_string(table.rows.size()) + " rows");
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw DataError("benchmark has duplicate config ids");
  }
  return table;
}

LearningCurveTable LoadBenchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open benchmark " + path.string());
  return LoadBenchmark(in);
}

std::vector<Crossing> CrossingReport(const LearningCurveTable& table) {
  std::vector<Crossing> crossings;
  const std::size_t n = table.rows.size();
  const auto units = static_cast<std::size_t>(table.units);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = table.rows[i].metric;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = table.rows[j].metric;
      const int final_order = Sign(a[units - 1] - b[units - 1]);
      for (std::size_t u = units - 1; u-- > 0;) {
        if (Sign(a[u] - b[u]) != final_order) {
          crossings.push_back({table.rows[i].id, table.rows[j].id, static_cast<int>(u + 1)});
          break;
        }
      }
    }
  }
  return crossings;
}

std::vector<LearningCurveTable> ImputeMissingRows(std::vector<LearningCurveTable> seeds) {
  if (seeds.size() <= 1) return seeds;
  const LearningCurveTable& ref = seeds.front();
  for (const LearningCurveTable& t : seeds) {
    if (t.units != ref.units || t.direction != ref.direction || t.metric_name != ref.metric_name) {
      throw DataError("benchmark seeds disagree on units, metric or direction");
    }
  }
  std::map<std::int64_t, std::vector<const CurveRow*>> by_id;
  std::vector<std::map<std::int64_t, const CurveRow*>> per_seed(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (const CurveRow& row : seeds[s].rows) {
      by_id[row.id].push_back(&row);
      per_seed[s][row.id] = &row;
    }
  }
  std::vector<LearningCurveTable> out;
  out.reserve(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    LearningCurveTable t = seeds[s];
    t.rows.clear();
    for (const auto& [id, available] : by_id) {
      const auto it = per_seed[s].find(id);
      if (it != per_seed[s].end()) {
        t.rows.push_back(*it->second);
        continue;
      }
      CurveRow mean = *available.front();
      const auto k = static_cast<double>(available.size());
      std::fill(mean.metric.begin(), mean.metric.end(), 0.0);
      std::fill(mean.cost.begin(), mean.cost.end(), 0.0);
      double final_sum = 0.0;
      int final_count = 0;
      for (const CurveRow* r : available) {
        for (std::size_t u = 0; u < mean.metric.size(); ++u) {
          mean.metric[u] += r->metric[u] / k;
          mean.cost[u] += r->cost[u] / k;
        }
        if (r->final_metric) {
          final_sum += *r->final_metric;
          ++final_count;
        }
      }
      mean.final_metric = final_count > 0 ? std::optional<double>(final_sum / final_count)
                                          : std::nullopt;
      t.rows.push_back(std::move(mean));
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace pasha
