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
#include <deque>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "pasha/error.h"
#include "pasha/scheduler.h"
#include "pasha/searcher.h"

using namespace pasha;

namespace {

using MetricFn = std::function<double(std::size_t universe_index, int rung)>;

constexpr std::size_t kUniverse = 512;

SchedulerConfig Config(Method method, Resource max_resource, std::size_t n,
                       RankingCriterion criterion = DirectRanking{}) {
  SchedulerConfig config;
  config.resources = ResourceSpec{1, 3, max_resource};
  config.criterion = criterion;
  config.num_configs = n;
  config.method = method;
  config.seed = 11;
  return config;
}

Scheduler Make(const SchedulerConfig& config) {
  return Scheduler(config, std::make_unique<RandomSearcher>(kUniverse, config.seed));
}

// Distinct per-config quality in (0, 1).
double Quality(std::size_t index) {
  static const std::vector<double> table = [] {
    std::vector<double> q(kUniverse);
    std::iota(q.begin(), q.end(), 1.0);
    std::shuffle(q.begin(), q.end(), std::mt19937_64(3));
    for (double& v : q) v /= static_cast<double>(kUniverse + 1);
    return q;
  }();
  return table.at(index);
}

double Consistent(std::size_t index, int) { return Quality(index); }
double Alternating(std::size_t index, int rung) {
  return rung % 2 == 0 ? Quality(index) : 1.0 - Quality(index);
}

// Keeps `workers` jobs outstanding and completes them oldest first.
std::vector<Job> Drive(Scheduler& scheduler, const MetricFn& metric, std::size_t workers,
                       const std::function<void(const Scheduler&, const Job&)>& on_issue = {}) {
  std::vector<Job> issued;
  std::deque<Job> running;
  while (true) {
    while (running.size() < workers) {
      const auto job = scheduler.GetJob();
      if (!job) break;
      if (on_issue) on_issue(scheduler, *job);
      issued.push_back(*job);
      running.push_back(*job);
    }
    if (running.empty()) break;
    const Job job = running.front();
    running.pop_front();
    scheduler.Report(job, metric(scheduler.record(job.config).universe_index, job.rung));
  }
  return issued;
}

}  // namespace

TEST_CASE("get_job promotes the top of a rung once it has eta entries") {
  Scheduler s = Make(Config(Method::kAsha, 9, 10));
  std::vector<Job> jobs;
  for (int i = 0; i < 3; ++i) jobs.push_back(*s.GetJob());
  for (const Job& j : jobs) CHECK(j.rung == 0);
  s.Report(jobs[0], 0.9);
  s.Report(jobs[1], 0.5);
  // Two entries: floor(2/3) = 0 candidates, so a new config is drawn.
  const Job fresh = *s.GetJob();
  CHECK(fresh.rung == 0);
  CHECK(fresh.config == ConfigId{3});
  s.Report(jobs[2], 0.1);
  const Job promoted = *s.GetJob();
  CHECK(promoted == Job{jobs[0].config, 1, 3});
  CHECK(s.ladder().Find(0, jobs[0].config)->promoted);
  // The candidate set is exhausted until rung 0 reaches six entries.
  CHECK(s.GetJob()->rung == 0);
}

TEST_CASE("no job when everything is drawn and nothing is promotable") {
  Scheduler s = Make(Config(Method::kAsha, 9, 2));
  const Job a = *s.GetJob();
  const Job b = *s.GetJob();
  CHECK_FALSE(s.GetJob().has_value());
  CHECK_FALSE(s.ShouldStop());
  s.Report(a, 0.4);
  CHECK_FALSE(s.ShouldStop());
  s.Report(b, 0.6);
  CHECK_FALSE(s.GetJob().has_value());
  CHECK(s.ShouldStop());
  const BestConfig best = s.Best();
  CHECK(best.config == b.config);
  CHECK(best.metric == 0.6);
  CHECK(best.max_resources == 1);
}

TEST_CASE("should_stop before everything is drawn") {
  Scheduler s = Make(Config(Method::kPasha, 9, 4));
  CHECK_FALSE(s.ShouldStop());
  s.Report(*s.GetJob(), 0.5);
  CHECK_FALSE(s.ShouldStop());
}

TEST_CASE("report errors") {
  Scheduler s = Make(Config(Method::kPasha, 9, 4));
  CHECK_THROWS_AS(s.Best(), InvariantError);
  const Job a = *s.GetJob();
  const Job b = *s.GetJob();
  CHECK_THROWS_AS(s.Report(Job{ConfigId{7}, 0, 1}, 0.1), InvariantError);
  CHECK_THROWS_AS(s.Report(Job{a.config, 1, 3}, 0.1), InvariantError);
  s.Report(a, 0.3);
  CHECK_THROWS_AS(s.Report(a, 0.3), InvariantError);
  CHECK_THROWS_AS(s.Report(b, std::nan("")), DataError);
}

TEST_CASE("single config best is its rung zero entry") {
  Scheduler s = Make(Config(Method::kPasha, 81, 1));
  const auto jobs = Drive(s, Consistent, 1);
  REQUIRE(jobs.size() == 1);
  const BestConfig best = s.Best();
  CHECK(best.config == ConfigId{0});
  CHECK(best.universe_index == s.record(ConfigId{0}).universe_index);
  CHECK(best.metric == Quality(best.universe_index));
  CHECK(best.max_resources == 1);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(Make(Config(Method::kRandom, 9, 4)), std::invalid_argument);
  CHECK_THROWS_AS(Make(Config(Method::kPasha, 9, 0)), std::invalid_argument);
  SchedulerConfig bad_eta = Config(Method::kPasha, 9, 4);
  bad_eta.resources.reduction_factor = 1;
  CHECK_THROWS_AS(Make(bad_eta), std::invalid_argument);
  CHECK_THROWS_AS(Make(Config(Method::kPasha, 9, 4, SoftRanking{-1.0})), std::invalid_argument);
  CHECK_THROWS_AS(Scheduler(Config(Method::kPasha, 9, 4), nullptr), std::invalid_argument);
  for (Method m : {Method::kPasha, Method::kAsha, Method::kOneEpoch, Method::kNoIncrease,
                   Method::kRandom}) {
    CHECK(ParseMethod(MethodName(m)) == m);
  }
  CHECK_THROWS_AS(ParseMethod("hyperband"), std::invalid_argument);
}

TEST_CASE("PASHA stays at the initial ladder when rankings agree") {
  Scheduler s = Make(Config(Method::kPasha, 81, 256));
  Drive(s, Consistent, 4);
  CHECK(s.ShouldStop());
  CHECK(s.growth_events() == 0);
  CHECK(s.pasha_state().resource_cap == 9);
  CHECK(s.Best().max_resources == 9);
}

TEST_CASE("PASHA grows to the clamp when rankings keep flipping") {
  Scheduler s = Make(Config(Method::kPasha, 200, 256));
  Resource last_cap = 0;
  Drive(s, Alternating, 4, [&](const Scheduler& sched, const Job& job) {
    CHECK(job.target_resource <= sched.pasha_state().resource_cap);
    CHECK(job.target_resource == sched.levels().resource(job.rung));
    CHECK(sched.pasha_state().resource_cap >= last_cap);
    last_cap = sched.pasha_state().resource_cap;
  });
  CHECK(s.pasha_state().resource_cap == 200);
  CHECK(s.pasha_state().top_rung == 4);
  CHECK(s.top_rung() == 5);
  // 9 -> 27 -> 81 -> 200.
  CHECK(s.growth_events() == 3);
  CHECK(s.Best().max_resources == 200);
}

TEST_CASE("growth never exceeds the number of ladder steps") {
  for (Resource max_resource : {9, 27, 81, 100, 243}) {
    CAPTURE(max_resource);
    Scheduler s = Make(Config(Method::kPasha, max_resource, 300));
    Drive(s, Alternating, 3);
    const ResourceSpec spec = s.config().resources;
    CHECK(s.growth_events() <= std::max(0, CeilLogRungs(spec.max_resource, spec) - 2));
    CHECK(s.pasha_state().resource_cap == max_resource);
  }
}

TEST_CASE("no-increase and one-epoch baselines") {
  Scheduler frozen = Make(Config(Method::kNoIncrease, 81, 256));
  Drive(frozen, Alternating, 4, [](const Scheduler&, const Job& job) {
    CHECK(job.target_resource <= 9);
  });
  CHECK(frozen.growth_events() == 0);
  CHECK(frozen.Best().max_resources == 9);

  Scheduler one = Make(Config(Method::kOneEpoch, 81, 50));
  const auto jobs = Drive(one, Consistent, 4);
  CHECK(jobs.size() == 50);
  for (const Job& j : jobs) CHECK(j.rung == 0);
  double best = 0.0;
  for (const Job& j : jobs) best = std::max(best, Quality(one.record(j.config).universe_index));
  CHECK(one.Best().metric == best);
  CHECK(one.Best().max_resources == 1);
}

TEST_CASE("ASHA respects its top rung and the promotion budget") {
  Scheduler s = Make(Config(Method::kAsha, 200, 256));
  const std::size_t workers = 4;
  Drive(s, Alternating, workers, [&](const Scheduler& sched, const Job& job) {
    CHECK(job.target_resource <= 200);
    if (job.rung == 0) return;
    // A promotion comes from the top floor(n / eta) of its source rung at the
    // moment it is decided.
    const auto sorted = sched.ladder().Sorted(job.rung - 1);
    const auto it = std::find_if(sorted.begin(), sorted.end(),
                                 [&](const RungEntry& e) { return e.config == job.config; });
    REQUIRE(it != sorted.end());
    CHECK(static_cast<std::size_t>(it - sorted.begin()) < sorted.size() / 3);
  });
  const RungLadder& ladder = s.ladder();
  for (int k = 0; k + 1 < ladder.num_rungs(); ++k) {
    std::size_t promoted = 0;
    for (const RungEntry& e : ladder.rung(k)) promoted += e.promoted ? 1 : 0;
    CHECK(ladder.rung(k + 1).size() == promoted);
  }
  CHECK(s.Best().max_resources == 200);
  // Every drawn config has exactly one rung-zero entry.
  CHECK(s.ladder().rung(0).size() == 256);
}

TEST_CASE("PASHA with a never-stable criterion replays ASHA") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SchedulerConfig asha_config = Config(Method::kAsha, 81, 64);
    SchedulerConfig pasha_config = Config(Method::kPasha, 81, 64, NeverStable{});
    asha_config.seed = pasha_config.seed = seed;
    Scheduler asha = Make(asha_config);
    Scheduler pasha = Make(pasha_config);
    const auto a = Drive(asha, Consistent, 4);
    const auto p = Drive(pasha, Consistent, 4);
    CHECK(a == p);
    CHECK(asha.Best().config == pasha.Best().config);
  }
}

TEST_CASE("affine rescaling of metrics leaves decisions unchanged") {
  auto shifted = [](double scale, double offset, MetricFn base) {
    return [=](std::size_t i, int k) { return scale * base(i, k) + offset; };
  };
  const MetricFn noisy = [](std::size_t i, int k) {
    return Quality(i) + 0.05 * std::sin(static_cast<double>(i * 7 + static_cast<std::size_t>(k)));
  };
  {
    Scheduler a = Make(Config(Method::kPasha, 81, 200));
    Scheduler b = Make(Config(Method::kPasha, 81, 200));
    CHECK(Drive(a, noisy, 4) == Drive(b, shifted(3.0, 2.0, noisy), 4));
    CHECK(a.Best().config == b.Best().config);
    CHECK(a.growth_events() == b.growth_events());
  }
  {
    Scheduler a = Make(Config(Method::kPasha, 81, 200, SoftRanking{0.02}));
    Scheduler b = Make(Config(Method::kPasha, 81, 200, SoftRanking{0.04}));
    CHECK(Drive(a, noisy, 4) == Drive(b, shifted(2.0, -1.0, noisy), 4));
    CHECK(a.Best().config == b.Best().config);
  }
}

TEST_CASE("pseudocode trigger compares one level lower") {
  // Rungs one and up agree with each other; rung zero is reversed.
  const MetricFn metric = [](std::size_t i, int k) {
    return k == 0 ? 1.0 - Quality(i) : Quality(i);
  };
  SchedulerConfig prose = Config(Method::kPasha, 81, 128);
  SchedulerConfig literal = prose;
  literal.trigger = StabilityTrigger::kPseudocode;
  Scheduler a = Make(prose);
  Scheduler b = Make(literal);
  Drive(a, metric, 4);
  Drive(b, metric, 4);
  CHECK(a.growth_events() == 0);
  CHECK(b.growth_events() > 0);
}

TEST_CASE("same seed gives the same run") {
  Scheduler a = Make(Config(Method::kPasha, 81, 128, SoftRanking{0.01}));
  Scheduler b = Make(Config(Method::kPasha, 81, 128, SoftRanking{0.01}));
  CHECK(Drive(a, Alternating, 3) == Drive(b, Alternating, 3));
}

TEST_CASE("random searcher") {
  RandomSearcher a(10, 5), b(10, 5), c(10, 6);
  std::vector<std::size_t> da, db, dc;
  for (int i = 0; i < 10; ++i) {
    da.push_back(a.Draw());
    db.push_back(b.Draw());
    dc.push_back(c.Draw());
  }
  CHECK(da == db);
  CHECK(da != dc);
  CHECK(std::set<std::size_t>(da.begin(), da.end()).size() == 10);
  CHECK(*std::max_element(da.begin(), da.end()) == 9);
  CHECK(a.remaining() == 0);
  CHECK_THROWS_AS(a.Draw(), DataError);

  SchedulerConfig config = Config(Method::kOneEpoch, 9, 5);
  Scheduler s(config, std::make_unique<RandomSearcher>(4, 0));
  for (int i = 0; i < 4; ++i) CHECK(s.GetJob().has_value());
  CHECK_THROWS_AS(s.GetJob(), DataError);
}
