//------------------------------------------------------------------------------
//
//   Copyright 2026 The crowdbandit Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "crowdbandit/world.hpp"
#include "oracles.hpp"

#include "gtest/gtest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using namespace crowdbandit;

namespace {

WorkerSpec fixed_worker(double sr)
{
  return {WorkerId{1}, sr, 0};
}

std::vector<RoundReport> realize(SimConfig const &c, WorkerSpec const &w, std::uint64_t seed, Round t = 1)
{
  RandomStream task_rng(seed, StreamTag::tasks);
  auto         tasks = generate_tasks(c, task_rng);
  RandomStream pref_rng(seed, StreamTag::preference, {1, t});
  auto         pref = draw_preferences(w, t, tasks, c, pref_rng);
  std::vector<GroundTruth> truths;
  for (auto id : pref.tasks)
  {
    RandomStream gt(seed, StreamTag::ground_truth, {value_of(id), t});
    truths.push_back(realize_ground_truth(tasks[slot(id)], t, c, gt));
  }
  RandomStream rng(seed, StreamTag::behavior, {1, t});
  return realize_round_behavior(w, pref, truths, c, rng);
}

}  // namespace

TEST(WorldTasks, DefaultCountAndUniformWeights)
{
  SimConfig    c;
  RandomStream rng(1);
  auto         tasks = generate_tasks(c, rng);
  ASSERT_EQ(tasks.size(), 40u);
  for (std::size_t j = 0; j < tasks.size(); ++j)
  {
    EXPECT_EQ(tasks[j].id, task_at(j));
    EXPECT_EQ(tasks[j].weight, 1.0);
    EXPECT_GE(tasks[j].base_value, c.base_min);
    EXPECT_LE(tasks[j].base_value, c.base_max);
  }
}

TEST(WorldTasks, SingleTask)
{
  SimConfig c;
  c.tasks    = 1;
  c.pref_min = 1;
  c.pref_max = 1;
  RandomStream rng(1);
  auto         tasks = generate_tasks(c, rng);
  ASSERT_EQ(tasks.size(), 1u);
  EXPECT_EQ(tasks[0].id, TaskId{1});
}

TEST(WorldTasks, SameSeedSameBaseValues)
{
  SimConfig c;
  c.tasks = 3;
  RandomStream a(7);
  RandomStream b(7);
  auto         first  = generate_tasks(c, a);
  auto         second = generate_tasks(c, b);
  for (std::size_t j = 0; j < 3; ++j)
  {
    EXPECT_EQ(first[j].base_value, second[j].base_value);
  }
}

TEST(WorldTasks, ExplicitWeights)
{
  SimConfig c;
  c.tasks        = 3;
  c.pref_min     = 1;
  c.pref_max     = 3;
  c.task_weights = {1.0, 2.0, 0.5};
  RandomStream rng(1);
  auto         tasks = generate_tasks(c, rng);
  EXPECT_EQ(tasks[1].weight, 2.0);
  EXPECT_EQ(tasks[2].weight, 0.5);
}

TEST(WorldPopulation, BucketLawHundred)
{
  SimConfig    c;
  RandomStream rng(13);
  auto         workers = generate_population(c, rng);
  ASSERT_EQ(workers.size(), 100u);
  std::vector<int>    counts(4, 0);
  std::vector<double> sums(4, 0.0);
  for (std::size_t i = 0; i < workers.size(); ++i)
  {
    auto const &w = workers[i];
    EXPECT_EQ(w.id, worker_at(i));
    auto const &b = c.sr_buckets[w.bucket];
    EXPECT_GE(w.expected_sr, b.lo);
    EXPECT_LE(w.expected_sr, b.hi);
    ++counts[w.bucket];
    sums[w.bucket] += w.expected_sr;
  }
  for (std::size_t b = 0; b < 4; ++b)
  {
    EXPECT_EQ(counts[b], 25);
    double const mean = sums[b] / counts[b];
    EXPECT_GE(mean, c.sr_buckets[b].lo);
    EXPECT_LE(mean, c.sr_buckets[b].hi);
  }
}

TEST(WorldPopulation, FourWorkersOnePerBucket)
{
  SimConfig c;
  c.workers = 4;
  c.winners = 2;
  RandomStream rng(5);
  auto         workers = generate_population(c, rng);
  std::multiset<std::size_t> buckets;
  for (auto const &w : workers)
  {
    buckets.insert(w.bucket);
  }
  EXPECT_EQ(buckets, (std::multiset<std::size_t>{0, 1, 2, 3}));
}

TEST(WorldPopulation, RemainderGoesToLowestBucket)
{
  SimConfig c;
  c.workers = 90;
  RandomStream rng(2);
  std::vector<int> counts(4, 0);
  for (auto const &w : generate_population(c, rng))
  {
    ++counts[w.bucket];
  }
  EXPECT_EQ(counts, (std::vector<int>{22, 22, 22, 24}));
}

TEST(WorldPopulation, BucketLawAnyMultipleOfFour)
{
  for (std::uint32_t n = 4; n <= 200; n += 4)
  {
    SimConfig c;
    c.workers = n;
    c.winners = 1;
    RandomStream rng(n);
    std::vector<std::uint32_t> counts(4, 0);
    for (auto const &w : generate_population(c, rng))
    {
      ++counts[w.bucket];
    }
    for (auto count : counts)
    {
      EXPECT_EQ(count, n / 4) << "N=" << n;
    }
  }
}

TEST(WorldPreferences, TableRanges)
{
  SimConfig   c;
  World const world(c, 11);
  for (std::uint32_t i = 1; i <= c.workers; ++i)
  {
    for (Round t = 1; t <= 20; ++t)
    {
      auto p = world.preference(WorkerId{i}, t);
      EXPECT_GE(p.tasks.size(), 5u);
      EXPECT_LE(p.tasks.size(), 15u);
      EXPECT_TRUE(std::is_sorted(p.tasks.begin(), p.tasks.end()));
      EXPECT_EQ(std::adjacent_find(p.tasks.begin(), p.tasks.end()), p.tasks.end());
      ASSERT_EQ(p.per_task_costs.size(), p.tasks.size());
      double sum = 0.0;
      for (auto cost : p.per_task_costs)
      {
        EXPECT_GE(cost, c.cost_min);
        EXPECT_LE(cost, c.cost_max);
        sum += cost;
      }
      EXPECT_DOUBLE_EQ(sum, p.true_cost);
      EXPECT_GE(p.true_cost, 0.5);
      EXPECT_LE(p.true_cost, 15.0);
      EXPECT_EQ(p.claimed_cost, p.true_cost);
    }
  }
}

TEST(WorldPreferences, ForcedSingleTask)
{
  SimConfig c;
  c.tasks    = 1;
  c.pref_min = 1;
  c.pref_max = 1;
  World const world(c, 3);
  auto        p = world.preference(WorkerId{4}, 9);
  EXPECT_EQ(p.tasks, (std::vector<TaskId>{TaskId{1}}));
}

TEST(WorldPreferences, Deterministic)
{
  World const world(SimConfig{}, 21);
  auto        a = world.preference(WorkerId{17}, 5);
  auto        b = world.preference(WorkerId{17}, 5);
  EXPECT_EQ(a.tasks, b.tasks);
  EXPECT_EQ(a.per_task_costs, b.per_task_costs);
  auto other = world.preference(WorkerId{17}, 6);
  EXPECT_FALSE(other.tasks == a.tasks && other.per_task_costs == a.per_task_costs);
}

TEST(WorldPreferences, PrefMaxAboveTaskCountRejected)
{
  SimConfig c;
  c.tasks = 10;
  EXPECT_THROW(validate(c), ConfigError);

  SimConfig ok;
  ok.tasks = 20;
  RandomStream rng(1);
  auto         tasks = generate_tasks(ok, rng);
  tasks.resize(10);
  EXPECT_THROW(draw_preferences(fixed_worker(0.5), 1, tasks, ok, rng), ConfigError);
}

TEST(WorldGroundTruth, ZeroPerturbationKeepsBase)
{
  SimConfig c;
  c.truth_jitter = 0.0;
  RandomStream rng(1);
  auto         g = realize_ground_truth({TaskId{1}, 1.0, 50.0}, 3, c, rng);
  EXPECT_EQ(g.value, 50.0);
  EXPECT_EQ(g.round, 3u);
}

TEST(WorldGroundTruth, BaseHundredStaysInBand)
{
  SimConfig c;
  c.value_max = 200.0;
  for (std::uint64_t s = 0; s < 2000; ++s)
  {
    RandomStream rng(s);
    auto         g = realize_ground_truth({TaskId{1}, 1.0, 100.0}, 1, c, rng);
    EXPECT_GE(g.value, 90.0);
    EXPECT_LE(g.value, 110.0);
  }
}

TEST(WorldGroundTruth, ClampedToValueRange)
{
  SimConfig c;
  RandomStream rng(4);
  for (int k = 0; k < 200; ++k)
  {
    auto g = realize_ground_truth({TaskId{1}, 1.0, 99.0}, 1, c, rng);
    EXPECT_LE(g.value, c.value_max);
  }
}

TEST(WorldGroundTruth, Replayable)
{
  World const a(SimConfig{}, 8);
  World const b(SimConfig{}, 8);
  for (std::uint32_t j = 1; j <= 40; ++j)
  {
    EXPECT_EQ(a.ground_truth(TaskId{j}, 12).value, b.ground_truth(TaskId{j}, 12).value);
  }
}

TEST(WorldBehavior, CertainHonesty)
{
  SimConfig c;
  c.sr_jitter = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s)
  {
    for (auto const &r : realize(c, fixed_worker(1.0), s))
    {
      EXPECT_TRUE(r.honest);
    }
  }
}

TEST(WorldBehavior, CertainDishonesty)
{
  SimConfig c;
  c.sr_jitter = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s)
  {
    RandomStream task_rng(s, StreamTag::tasks);
    auto         tasks = generate_tasks(c, task_rng);
    for (auto const &r : realize(c, fixed_worker(0.0), s))
    {
      EXPECT_FALSE(r.honest);
      RandomStream gt(s, StreamTag::ground_truth, {value_of(r.task), 1});
      auto truth = realize_ground_truth(tasks[slot(r.task)], 1, c, gt).value;
      EXPECT_GE(std::abs(r.reported_value - truth), 2.0 * c.eps3);
    }
  }
}

TEST(WorldBehavior, HonestFractionMatchesRate)
{
  SimConfig   c;
  std::size_t honest = 0;
  std::size_t total  = 0;
  for (std::uint64_t s = 0; total < 10000; ++s)
  {
    for (auto const &r : realize(c, fixed_worker(0.7), s, static_cast<Round>(s % 17 + 1)))
    {
      honest += r.honest ? 1 : 0;
      ++total;
    }
  }
  double const fraction = static_cast<double>(honest) / static_cast<double>(total);
  EXPECT_NEAR(fraction, 0.7, 0.02);
}

TEST(WorldBehavior, MisalignedTruthsRejected)
{
  SimConfig    c;
  RandomStream rng(1);
  RoundPreference pref{WorkerId{1}, 1, {TaskId{1}, TaskId{2}}, {0.5, 0.5}, 1.0, 1.0};
  std::vector<GroundTruth> truths{{TaskId{1}, 1, 40.0}};
  EXPECT_THROW(realize_round_behavior(fixed_worker(0.5), pref, truths, c, rng), std::logic_error);
}

TEST(WorldGtd, Identity)
{
  GroundTruthBoard board(4);
  board.add({TaskId{9}, 4, 73.2});
  EXPECT_EQ(collect_gtd(TaskId{9}, 4, board).value, 73.2);
}

TEST(WorldGtd, UnknownPairIsInternalError)
{
  GroundTruthBoard board(4);
  board.add({TaskId{9}, 4, 73.2});
  EXPECT_THROW(collect_gtd(TaskId{8}, 4, board), std::logic_error);
  EXPECT_THROW(collect_gtd(TaskId{9}, 5, board), std::logic_error);
}

TEST(WorldGtd, HonestySeparation)
{
  SimConfig   c;
  World const world(c, 99);
  std::size_t honest = 0;
  std::size_t fake   = 0;
  for (Round t = 1; t <= 30; ++t)
  {
    for (std::uint32_t i = 1; i <= c.workers; ++i)
    {
      auto pref  = world.preference(WorkerId{i}, t);
      auto board = world.dispatch_employees(pref.tasks, t);
      for (auto const &r : world.behavior(pref))
      {
        double const gap = std::abs(r.reported_value - collect_gtd(r.task, t, board).value);
        if (r.honest)
        {
          ++honest;
          EXPECT_LT(gap, c.eps1);
        }
        else
        {
          ++fake;
          EXPECT_GE(gap, 2.0 * c.eps3);
          EXPECT_GT(gap, c.eps1);
        }
      }
    }
  }
  EXPECT_GT(honest, 1000u);
  EXPECT_GT(fake, 1000u);
}

TEST(WorldDeterminism, PureFunctionOfConfigAndSeed)
{
  SimConfig   c;
  World const a(c, 1234);
  World const b(c, 1234);
  for (std::size_t i = 0; i < c.workers; ++i)
  {
    EXPECT_EQ(a.workers()[i].expected_sr, b.workers()[i].expected_sr);
    EXPECT_EQ(a.workers()[i].bucket, b.workers()[i].bucket);
  }
  for (Round t = 1; t <= 5; ++t)
  {
    for (std::uint32_t i = 1; i <= c.workers; i += 7)
    {
      auto ra = a.behavior(a.preference(WorkerId{i}, t));
      auto rb = b.behavior(b.preference(WorkerId{i}, t));
      ASSERT_EQ(ra.size(), rb.size());
      for (std::size_t k = 0; k < ra.size(); ++k)
      {
        EXPECT_EQ(ra[k].reported_value, rb[k].reported_value);
        EXPECT_EQ(ra[k].honest, rb[k].honest);
      }
    }
  }
  World const other(c, 1235);
  EXPECT_NE(a.workers()[0].expected_sr, other.workers()[0].expected_sr);
}

TEST(WorldImport, CsvOverridesDrawnTruth)
{
  auto const path = std::filesystem::temp_directory_path() / "crowdbandit_gt_import.csv";
  {
    std::ofstream out(path);
    out << "task_id,round,value\n";
    for (std::uint32_t j = 1; j <= 40; ++j)
    {
      out << j << ",1," << 10.0 + j << '\n';
    }
  }
  SimConfig c;
  c.ground_truth_csv = path.string();
  World const world(c, 5);
  EXPECT_EQ(world.ground_truth(TaskId{3}, 1).value, 13.0);
  EXPECT_THROW(world.ground_truth(TaskId{3}, 2), std::out_of_range);

  auto pref = world.preference(WorkerId{1}, 1);
  for (auto const &r : world.behavior(pref))
  {
    double const truth = 10.0 + value_of(r.task);
    if (r.honest)
    {
      EXPECT_LT(std::abs(r.reported_value - truth), c.eps1);
    }
    else
    {
      EXPECT_GE(std::abs(r.reported_value - truth), 2.0 * c.eps3);
    }
  }
  std::filesystem::remove(path);
}

TEST(WorldImport, BadHeaderRejected)
{
  auto const path = std::filesystem::temp_directory_path() / "crowdbandit_gt_bad.csv";
  {
    std::ofstream out(path);
    out << "task,round,value\n1,1,3\n";
  }
  EXPECT_THROW(GroundTruthTable::load_csv(path.string()), ConfigError);
  EXPECT_THROW(GroundTruthTable::load_csv("/nonexistent/gt.csv"), ConfigError);
  std::filesystem::remove(path);
}

TEST(WorldImport, TableFromMemory)
{
  GroundTruthTable table;
  table.insert(TaskId{1}, 1, 55.5);
  World const world(SimConfig{}, 5, table);
  EXPECT_EQ(world.ground_truth(TaskId{1}, 1).value, 55.5);
  EXPECT_EQ(table.size(), 1u);
}
