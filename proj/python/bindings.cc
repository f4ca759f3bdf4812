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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <sstream>

#include "pasha/benchgen.h"
#include "pasha/core.h"
#include "pasha/error.h"
#include "pasha/experiment.h"
#include "pasha/ranking.h"
#include "pasha/scheduler.h"
#include "pasha/searcher.h"
#include "pasha/simulator.h"

namespace py = pybind11;
using namespace pasha;

namespace {

using Pairs = std::vector<std::pair<std::uint32_t, double>>;

// Completion order follows the input order, so ties keep it.
RankedList ToList(const Pairs& pairs) {
  std::vector<RankedItem> items;
  items.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    items.push_back({ConfigId{pairs[i].first}, pairs[i].second, i});
  }
  return RankedList(std::move(items));
}

std::vector<ConfigId> ToIds(const std::vector<std::uint32_t>& ids) {
  std::vector<ConfigId> out;
  for (auto id : ids) out.push_back(ConfigId{id});
  return out;
}

SchedulerConfig MakeConfig(const std::string& method, const std::string& ranking,
                           Resource min_resource, int eta, Resource max_resource,
                           std::size_t num_configs, std::uint64_t seed, const std::string& trigger) {
  SchedulerConfig config;
  config.method = ParseMethod(method);
  config.criterion = ParseCriterion(ranking);
  config.resources = ResourceSpec{min_resource, eta, max_resource};
  config.num_configs = num_configs;
  config.seed = seed;
  if (trigger == "pseudocode") {
    config.trigger = StabilityTrigger::kPseudocode;
  } else if (trigger != "top-two") {
    throw std::invalid_argument("trigger must be top-two or pseudocode");
  }
  return config;
}

py::dict RowDict(const MethodSummary& row) {
  py::dict d;
  d["label"] = row.label;
  d["repetitions"] = row.repetitions;
  d["metric_mean"] = row.metric_mean;
  d["metric_std"] = row.metric_std;
  d["runtime_mean"] = row.runtime_mean;
  d["runtime_std"] = row.runtime_std;
  d["speedup"] = row.speedup;
  d["max_resources_mean"] = row.max_resources_mean;
  d["max_resources_std"] = row.max_resources_std;
  d["resource_units_mean"] = row.resource_units_mean;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pasha, m) {
  m.doc() = "PASHA and ASHA schedulers, rank-stability criteria and a tabulated-benchmark simulator.";

  static py::exception<DataError> data_error(m, "DataError", PyExc_RuntimeError);
  static py::exception<InvariantError> invariant_error(m, "InvariantError", PyExc_AssertionError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      PyErr_SetString(data_error.ptr(), e.what());
    } catch (const InvariantError& e) {
      PyErr_SetString(invariant_error.ptr(), e.what());
    }
  });

  // Resource arithmetic.
  py::class_<ResourceSpec>(m, "ResourceSpec")
      .def(py::init([](Resource r, int eta, Resource big) {
             ResourceSpec spec{r, eta, big};
             spec.Validate();
             return spec;
           }),
           py::arg("min_resource"), py::arg("reduction_factor"), py::arg("max_resource"))
      .def_readonly("min_resource", &ResourceSpec::min_resource)
      .def_readonly("reduction_factor", &ResourceSpec::reduction_factor)
      .def_readonly("max_resource", &ResourceSpec::max_resource)
      .def("__repr__", [](const ResourceSpec& s) {
        std::ostringstream out;
        out << "ResourceSpec(" << s.min_resource << ", " << s.reduction_factor << ", "
            << s.max_resource << ")";
        return out.str();
      });

  py::class_<PashaState>(m, "PashaState")
      .def_readonly("t", &PashaState::t)
      .def_readonly("resource_cap", &PashaState::resource_cap)
      .def_readonly("top_rung", &PashaState::top_rung)
      .def("__eq__", [](const PashaState& a, const PashaState& b) { return a == b; })
      .def("__repr__", [](const PashaState& s) {
        return "PashaState(t=" + std::to_string(s.t) + ", resource_cap=" +
               std::to_string(s.resource_cap) + ", top_rung=" + std::to_string(s.top_rung) + ")";
      });

  m.def("rung_resource", &RungResource, py::arg("k"), py::arg("spec"));
  m.def("rung_levels", [](const ResourceSpec& spec) { return RungLevels(spec).levels(); },
        py::arg("spec"), "Resource of every rung; the last one is max_resource.");
  m.def("initial_pasha_state", &InitialPashaState, py::arg("spec"));
  m.def("grow", &Grow, py::arg("state"), py::arg("spec"));

  // Ranking. Lists are (config, metric) pairs; larger metrics rank first.
  m.def("soft_rank",
        [](const Pairs& items, double epsilon) {
          std::vector<std::vector<std::uint32_t>> out;
          for (const auto& pos : ComputeSoftRank(ToList(items), epsilon).positions) {
            auto& ids = out.emplace_back();
            for (ConfigId id : pos) ids.push_back(id.value);
          }
          return out;
        },
        py::arg("items"), py::arg("epsilon"));
  m.def("is_stable",
        [](const std::string& criterion, const Pairs& top, const Pairs& below) {
          return IsStable(ParseCriterion(criterion), ToList(top), ToList(below));
        },
        py::arg("criterion"), py::arg("top"), py::arg("below"));
  m.def("epsilon_sigma", [](const Pairs& below, double m) { return EpsilonSigma(ToList(below), m); },
        py::arg("below"), py::arg("multiplier"));
  m.def("epsilon_mean_distance", [](const Pairs& below) { return EpsilonMeanDistance(ToList(below)); },
        py::arg("below"));
  m.def("epsilon_median_distance",
        [](const Pairs& below) { return EpsilonMedianDistance(ToList(below)); }, py::arg("below"));
  m.def("rbo",
        [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b, double p) {
          return RankBiasedOverlap(ToIds(a), ToIds(b), p);
        },
        py::arg("top_order"), py::arg("below_order"), py::arg("p"));
  m.def("rrr",
        [](const Pairs& top, const std::vector<std::uint32_t>& below, double p) {
          return ReciprocalRankRegret(ToList(top), ToIds(below), p);
        },
        py::arg("top"), py::arg("below_order"), py::arg("p"));
  m.def("arrr",
        [](const Pairs& top, const std::vector<std::uint32_t>& below, double p) {
          return AbsoluteReciprocalRankRegret(ToList(top), ToIds(below), p);
        },
        py::arg("top"), py::arg("below_order"), py::arg("p"));
  m.def("normalize_criterion", [](const std::string& text) { return ToString(ParseCriterion(text)); },
        py::arg("text"));

  // Benchmarks.
  py::class_<CurveModel>(m, "CurveModel")
      .def(py::init<>())
      .def_property(
          "family", [](const CurveModel& c) { return std::string(CurveFamilyName(c.family)); },
          [](CurveModel& c, const std::string& v) { c.family = ParseCurveFamily(v); })
      .def_readwrite("asymptote_low", &CurveModel::asymptote_low)
      .def_readwrite("asymptote_high", &CurveModel::asymptote_high)
      .def_readwrite("top_spread", &CurveModel::top_spread)
      .def_readwrite("amplitude_low", &CurveModel::amplitude_low)
      .def_readwrite("amplitude_high", &CurveModel::amplitude_high)
      .def_readwrite("rate", &CurveModel::rate)
      .def_readwrite("noise_std", &CurveModel::noise_std)
      .def_readwrite("crossing_horizon", &CurveModel::crossing_horizon)
      .def_readwrite("allow_observed_crossings", &CurveModel::allow_observed_crossings)
      .def_readwrite("cost_low", &CurveModel::cost_low)
      .def_readwrite("cost_high", &CurveModel::cost_high);

  py::class_<LearningCurveTable>(m, "LearningCurveTable")
      .def_readonly("units", &LearningCurveTable::units)
      .def_readonly("metric_name", &LearningCurveTable::metric_name)
      .def_readonly("resource_unit", &LearningCurveTable::resource_unit)
      .def_property_readonly("maximize",
                             [](const LearningCurveTable& t) {
                               return t.direction == MetricDirection::kMaximize;
                             })
      .def("__len__", &LearningCurveTable::size)
      .def("ids", [](const LearningCurveTable& t) {
        std::vector<std::int64_t> ids;
        for (const auto& row : t.rows) ids.push_back(row.id);
        return ids;
      })
      .def("metrics", [](const LearningCurveTable& t, std::size_t row) { return t.rows.at(row).metric; },
           py::arg("row"))
      .def("costs", [](const LearningCurveTable& t, std::size_t row) { return t.rows.at(row).cost; },
           py::arg("row"))
      .def("metric_at", &LearningCurveTable::MetricAt, py::arg("row"), py::arg("resource"))
      .def("full_fidelity_metric", &LearningCurveTable::FullFidelityMetric, py::arg("row"))
      .def("__eq__", [](const LearningCurveTable& a, const LearningCurveTable& b) { return a == b; })
      .def("to_text", [](const LearningCurveTable& t) {
        std::ostringstream out;
        SaveBenchmark(t, out);
        return out.str();
      });

  m.def("generate_benchmark", &GenerateBenchmark, py::arg("num_configs"), py::arg("units"),
        py::arg("model") = CurveModel{}, py::arg("seed") = 0);
  m.def("load_benchmark", py::overload_cast<const std::filesystem::path&>(&LoadBenchmark),
        py::arg("path"));
  m.def("parse_benchmark", [](const std::string& text) {
        std::istringstream in(text);
        return LoadBenchmark(in);
      }, py::arg("text"));
  m.def("save_benchmark",
        py::overload_cast<const LearningCurveTable&, const std::filesystem::path&>(&SaveBenchmark),
        py::arg("table"), py::arg("path"));
  m.def("crossing_report",
        [](const LearningCurveTable& t) {
          std::vector<std::tuple<std::int64_t, std::int64_t, int>> out;
          for (const Crossing& c : CrossingReport(t)) out.emplace_back(c.first, c.second, c.last_crossing);
          return out;
        },
        py::arg("table"), "(first id, second id, last crossing) for every pair that ever crosses.");

  // Scheduling and simulation.
  py::class_<Scheduler>(m, "Scheduler")
      .def(py::init([](std::size_t universe_size, const std::string& method,
                       const std::string& ranking, Resource min_resource, int eta,
                       Resource max_resource, std::size_t num_configs, std::uint64_t seed,
                       const std::string& trigger) {
             SchedulerConfig config = MakeConfig(method, ranking, min_resource, eta, max_resource,
                                                 num_configs, seed, trigger);
             return std::make_unique<Scheduler>(config,
                                                std::make_unique<RandomSearcher>(universe_size, seed));
           }),
           py::arg("universe_size"), py::arg("method") = "pasha", py::arg("ranking") = "soft:0.025",
           py::arg("min_resource") = 1, py::arg("eta") = 3, py::arg("max_resource") = 81,
           py::arg("num_configs") = 256, py::arg("seed") = 0, py::arg("trigger") = "top-two")
      .def("get_job",
           [](Scheduler& s) -> std::optional<std::tuple<std::uint32_t, int, Resource>> {
             const auto job = s.GetJob();
             if (!job) return std::nullopt;
             return std::make_tuple(job->config.value, job->rung, job->target_resource);
           },
           "(config, rung, resource) or None when nothing is actionable.")
      .def("report",
           [](Scheduler& s, std::uint32_t config, int rung, double metric) {
             s.Report(Job{ConfigId{config}, rung, s.levels().resource(rung)}, metric);
           },
           py::arg("config"), py::arg("rung"), py::arg("metric"))
      .def("should_stop", &Scheduler::ShouldStop)
      .def("universe_index", [](const Scheduler& s, std::uint32_t id) {
        return s.record(ConfigId{id}).universe_index;
      }, py::arg("config"))
      .def("best", [](const Scheduler& s) {
        const BestConfig b = s.Best();
        py::dict d;
        d["config"] = b.config.value;
        d["universe_index"] = b.universe_index;
        d["metric"] = b.metric;
        d["max_resources"] = b.max_resources;
        return d;
      })
      .def_property_readonly("pasha_state", &Scheduler::pasha_state)
      .def_property_readonly("growth_events", &Scheduler::growth_events)
      .def_property_readonly("top_rung", &Scheduler::top_rung)
      .def_property_readonly("drawn", &Scheduler::drawn);

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("wall_clock", &SimResult::wall_clock)
      .def_property_readonly("chosen", [](const SimResult& r) { return r.chosen.value; })
      .def_readonly("chosen_row", &SimResult::chosen_row)
      .def_readonly("chosen_metric", &SimResult::chosen_metric)
      .def_readonly("chosen_metric_full", &SimResult::chosen_metric_full)
      .def_readonly("max_resources", &SimResult::max_resources)
      .def_readonly("jobs_executed", &SimResult::jobs_executed)
      .def_readonly("resource_units", &SimResult::resource_units)
      .def_readonly("growth_events", &SimResult::growth_events)
      .def("trace_text", [](const SimResult& r) {
        std::ostringstream out;
        WriteTrace(out, {}, r.trace);
        return out.str();
      })
      .def("__eq__", [](const SimResult& a, const SimResult& b) { return a == b; });

  m.def("simulate",
        [](const LearningCurveTable& table, const std::string& method, const std::string& ranking,
           Resource min_resource, int eta, Resource max_resource, std::size_t num_configs,
           int workers, std::uint64_t seed, const std::string& trigger) {
          const SchedulerConfig config = MakeConfig(method, ranking, min_resource, eta,
                                                    max_resource, num_configs, seed, trigger);
          py::gil_scoped_release release;
          return Simulate(config, table, workers);
        },
        py::arg("table"), py::arg("method") = "pasha", py::arg("ranking") = "soft:0.025",
        py::arg("min_resource") = 1, py::arg("eta") = 3, py::arg("max_resource") = 81,
        py::arg("num_configs") = 256, py::arg("workers") = 4, py::arg("seed") = 0,
        py::arg("trigger") = "top-two");
  m.def("speedup", &Speedup, py::arg("reference_seconds"), py::arg("candidate_seconds"));

  // Experiments.
  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("metric_name", &ExperimentReport::metric_name)
      .def_property_readonly("rows", [](const ExperimentReport& r) {
        py::list rows;
        for (const auto& row : r.rows) rows.append(RowDict(row));
        return rows;
      })
      .def("emit", [](const ExperimentReport& r, const std::string& format) {
        return EmitReport(r, ParseReportFormat(format));
      }, py::arg("format") = "markdown");

  m.def("run_experiment",
        [](const std::string& config_text, const std::map<std::string, std::string>& settings) {
          std::istringstream in(config_text);
          ExperimentSpec spec = ParseExperimentConfig(in);
          for (const auto& [key, value] : settings) ApplyExperimentSetting(spec, key, value);
          spec.Validate();
          py::gil_scoped_release release;
          return RunExperiment(spec, PrepareBenchmarks(spec));
        },
        py::arg("config_text"), py::arg("settings") = std::map<std::string, std::string>{},
        "Runs an experiment file given as text; `settings` override its top-level keys.");
  m.def("aggregate_trace_dir", &AggregateTraceDir, py::arg("directory"));
}
