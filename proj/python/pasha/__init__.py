# Copyright 2026 The pasha Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""PASHA and ASHA schedulers with a deterministic benchmark simulator."""

from ._pasha import (
    CurveModel,
    DataError,
    ExperimentReport,
    InvariantError,
    LearningCurveTable,
    PashaState,
    ResourceSpec,
    Scheduler,
    SimResult,
    aggregate_trace_dir,
    arrr,
    crossing_report,
    epsilon_mean_distance,
    epsilon_median_distance,
    epsilon_sigma,
    generate_benchmark,
    grow,
    initial_pasha_state,
    is_stable,
    load_benchmark,
    normalize_criterion,
    parse_benchmark,
    rbo,
    rrr,
    run_experiment,
    rung_levels,
    rung_resource,
    save_benchmark,
    simulate,
    soft_rank,
    speedup,
)

__all__ = [name for name in dir() if not name.startswith("_")]
