#pragma once
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

#include "crowdbandit/config.hpp"
#include "crowdbandit/random.hpp"
#include "crowdbandit/types.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crowdbandit {

struct Task
{
  TaskId id{};
  double weight     = 1.0;
  double base_value = 0.0;
};

/// Hidden ground truth about one worker.
struct WorkerSpec
{
  WorkerId    id{};
  double      expected_sr = 0.0;
  std::size_t bucket      = 0;  // index into SimConfig::sr_buckets
};

/// What a worker wants to do in one round and what it costs.
struct RoundPreference
{
  WorkerId            worker{};
  Round               round = 0;
  std::vector<TaskId> tasks;           // sorted, no duplicates
  std::vector<double> per_task_costs;  // aligned with tasks
  double              true_cost    = 0.0;
  double              claimed_cost = 0.0;
};

struct GroundTruth
{
  TaskId task{};
  Round  round = 0;
  double value = 0.0;
};

/// A report as the platform sees it.
struct ObservedReport
{
  WorkerId worker{};
  TaskId   task{};
  Round    round  = 0;
  double   value  = 0.0;
};

/// A report together with the hidden honesty flag. Only the world, the
/// metrics and test oracles consume this type.
struct RoundReport
{
  WorkerId worker{};
  TaskId   task{};
  Round    round          = 0;
  double   reported_value = 0.0;
  bool     honest         = false;

  ObservedReport observed() const
  {
    return {worker, task, round, reported_value};
  }
};

inline std::vector<Task> generate_tasks(SimConfig const &config, RandomStream &rng)
{
  std::vector<Task> tasks;
  tasks.reserve(config.tasks);
  for (std::size_t j = 0; j < config.tasks; ++j)
  {
    auto id = task_at(j);
    tasks.push_back({id, config.weight_of(id), rng.uniform(config.base_min, config.base_max)});
  }
  return tasks;
}

/**
 * Split-bucket population. Bucket b receives floor(N * fraction_b) workers;
 * whatever rounding leaves over goes to the bucket with the lowest interval.
 * Bucket membership is shuffled over worker ids so ids carry no information.
 */
inline std::vector<WorkerSpec> generate_population(SimConfig const &config, RandomStream &rng)
{
  auto const         n       = static_cast<std::size_t>(config.workers);
  auto const        &buckets = config.sr_buckets;
  std::vector<std::size_t> counts(buckets.size());
  std::size_t        assigned = 0;
  for (std::size_t b = 0; b < buckets.size(); ++b)
  {
    counts[b] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * buckets[b].fraction + 1e-9));
    assigned += counts[b];
  }
  if (assigned > n)
  {
    throw ConfigError("sr_buckets: fractions over-allocate the population");
  }
  auto lowest = static_cast<std::size_t>(
      std::min_element(buckets.begin(), buckets.end(),
                       [](SrBucket const &a, SrBucket const &b) { return a.lo < b.lo; }) -
      buckets.begin());
  counts[lowest] += n - assigned;

  std::vector<std::size_t> labels;
  labels.reserve(n);
  for (std::size_t b = 0; b < buckets.size(); ++b)
  {
    labels.insert(labels.end(), counts[b], b);
  }
  std::shuffle(labels.begin(), labels.end(), rng.engine());

  std::vector<WorkerSpec> workers;
  workers.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    auto const &b = buckets[labels[i]];
    workers.push_back({worker_at(i), rng.uniform(b.lo, b.hi), labels[i]});
  }
  return workers;
}

inline RoundPreference draw_preferences(WorkerSpec const &worker, Round t, std::span<Task const> tasks,
                                        SimConfig const &config, RandomStream &rng)
{
  if (config.pref_max > tasks.size())
  {
    throw ConfigError("pref_max: preferred-task count cannot exceed M");
  }
  RoundPreference pref;
  pref.worker = worker.id;
  pref.round  = t;

  auto const size = static_cast<std::size_t>(rng.uniform_int(config.pref_min, config.pref_max));
  std::vector<TaskId> all(tasks.size());
  std::transform(tasks.begin(), tasks.end(), all.begin(), [](Task const &task) { return task.id; });
  pref.tasks.reserve(size);
  std::sample(all.begin(), all.end(), std::back_inserter(pref.tasks), size, rng.engine());

  pref.per_task_costs.reserve(size);
  for (std::size_t k = 0; k < size; ++k)
  {
    auto c = rng.uniform(config.cost_min, config.cost_max);
    pref.per_task_costs.push_back(c);
    pref.true_cost += c;
  }
  pref.claimed_cost = pref.true_cost;
  return pref;
}

inline GroundTruth realize_ground_truth(Task const &task, Round t, SimConfig const &config,
                                        RandomStream &rng)
{
  auto u     = rng.uniform(-config.truth_jitter, config.truth_jitter);
  auto value = std::clamp(task.base_value * (1.0 + u), config.value_min, config.value_max);
  return {task.id, t, value};
}

/**
 * Realizes what a recruited worker actually reports this round.
 *
 * `truths` must be aligned with `pref.tasks`. Honest reports land strictly
 * inside eps1 of the truth; fake reports land at least 2*eps3 away.
 */
inline std::vector<RoundReport> realize_round_behavior(WorkerSpec const &worker, RoundPreference const &pref,
                                                       std::span<GroundTruth const> truths,
                                                       SimConfig const &config, RandomStream &rng)
{
  if (truths.size() != pref.tasks.size())
  {
    throw std::logic_error("realize_round_behavior: ground truths not aligned with preference");
  }
  auto const sr =
      std::clamp(worker.expected_sr + rng.uniform(-config.sr_jitter, config.sr_jitter), 0.0, 1.0);
  auto const sigma    = config.eps1 / 3.0;
  auto const fake_gap = 2.0 * config.eps3;

  std::vector<RoundReport> reports;
  reports.reserve(pref.tasks.size());
  for (std::size_t k = 0; k < pref.tasks.size(); ++k)
  {
    auto const truth  = truths[k].value;
    bool const honest = rng.bernoulli(sr);
    double     v      = 0.0;
    if (honest)
    {
      do
      {
        v = truth + rng.normal(0.0, sigma);
      } while (!(std::abs(v - truth) < config.eps1));
    }
    else
    {
      do
      {
        v = rng.uniform(config.value_min, config.value_max);
      } while (!(std::abs(v - truth) >= fake_gap));
    }
    reports.push_back({worker.id, pref.tasks[k], pref.round, v, honest});
  }
  return reports;
}

/// Imported ground truth keyed by (task, round).
class GroundTruthTable
{
public:
  void insert(TaskId task, Round t, double value)
  {
    values_[{value_of(task), t}] = value;
  }

  std::optional<double> find(TaskId task, Round t) const
  {
    auto it = values_.find({value_of(task), t});
    if (it == values_.end())
    {
      return std::nullopt;
    }
    return it->second;
  }

  std::size_t size() const
  {
    return values_.size();
  }

  /// Reads a `task_id,round,value` CSV with header.
  static GroundTruthTable load_csv(std::string const &path)
  {
    std::ifstream in(path);
    if (!in)
    {
      throw ConfigError("ground_truth_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "task_id,round,value")
    {
      throw ConfigError("ground_truth_csv: expected header 'task_id,round,value'");
    }
    GroundTruthTable table;
    std::size_t      line_no = 1;
    while (std::getline(in, line))
    {
      ++line_no;
      if (detail::trim(line).empty())
      {
        continue;
      }
      auto fields = detail::split(line, ',');
      if (fields.size() != 3)
      {
        throw ConfigError("ground_truth_csv: line " + std::to_string(line_no) + " needs 3 fields");
      }
      table.insert(static_cast<TaskId>(detail::parse_u32("task_id", fields[0])),
                   detail::parse_u32("round", fields[1]), detail::parse_double("value", fields[2]));
    }
    return table;
  }

private:
  std::map<std::pair<std::uint32_t, Round>, double> values_;
};

/// Ground truth collected by employees for the tasks of one round.
class GroundTruthBoard
{
public:
  explicit GroundTruthBoard(Round t)
    : round_(t)
  {}

  void add(GroundTruth const &truth)
  {
    truths_[value_of(truth.task)] = truth;
  }

  bool contains(TaskId task) const
  {
    return truths_.count(value_of(task)) != 0;
  }

  Round round() const
  {
    return round_;
  }

  GroundTruth const &at(TaskId task, Round t) const
  {
    auto it = truths_.find(value_of(task));
    if (t != round_ || it == truths_.end())
    {
      throw std::logic_error("collect_gtd: no ground truth for task " + std::to_string(value_of(task)) +
                             " in round " + std::to_string(t));
    }
    return it->second;
  }

private:
  Round                                   round_;
  std::map<std::uint32_t, GroundTruth>    truths_;
};

/// Employees are noiseless: the collected value is the truth itself.
inline GroundTruth collect_gtd(TaskId task, Round t, GroundTruthBoard const &board)
{
  return board.at(task, t);
}

/**
 * The hidden environment. Every realization is a pure function of
 * (config, master seed, coordinates), so separate algorithms run against the
 * same world see identical preferences, truths and behaviour.
 */
class World
{
public:
  World(SimConfig config, std::uint64_t seed)
    : config_(std::move(config))
    , seed_(seed)
  {
    validate(config_);
    RandomStream task_rng(seed_, StreamTag::tasks);
    tasks_ = generate_tasks(config_, task_rng);
    RandomStream pop_rng(seed_, StreamTag::population);
    workers_ = generate_population(config_, pop_rng);
    if (!config_.ground_truth_csv.empty())
    {
      imported_ = std::make_shared<GroundTruthTable const>(
          GroundTruthTable::load_csv(config_.ground_truth_csv));
    }
  }

  World(SimConfig config, std::uint64_t seed, GroundTruthTable imported)
    : World(std::move(config), seed)
  {
    imported_ = std::make_shared<GroundTruthTable const>(std::move(imported));
  }

  SimConfig const &config() const
  {
    return config_;
  }

  std::uint64_t seed() const
  {
    return seed_;
  }

  std::span<Task const> tasks() const
  {
    return tasks_;
  }

  std::span<WorkerSpec const> workers() const
  {
    return workers_;
  }

  WorkerSpec const &worker(WorkerId id) const
  {
    return workers_.at(slot(id));
  }

  double weight(TaskId task) const
  {
    return tasks_.at(slot(task)).weight;
  }

  double weight_sum(std::span<TaskId const> ids) const
  {
    double total = 0.0;
    for (auto id : ids)
    {
      total += weight(id);
    }
    return total;
  }

  RoundPreference preference(WorkerId id, Round t) const
  {
    RandomStream rng(seed_, StreamTag::preference, {value_of(id), t});
    return draw_preferences(worker(id), t, tasks_, config_, rng);
  }

  GroundTruth ground_truth(TaskId task, Round t) const
  {
    if (imported_)
    {
      auto v = imported_->find(task, t);
      if (!v)
      {
        throw std::out_of_range("ground_truth_csv: no value for task " + std::to_string(value_of(task)) +
                                " in round " + std::to_string(t));
      }
      return {task, t, *v};
    }
    RandomStream rng(seed_, StreamTag::ground_truth, {value_of(task), t});
    return realize_ground_truth(tasks_.at(slot(task)), t, config_, rng);
  }

  /// Full reports including the hidden honesty flag.
  std::vector<RoundReport> behavior(RoundPreference const &pref) const
  {
    std::vector<GroundTruth> truths;
    truths.reserve(pref.tasks.size());
    for (auto task : pref.tasks)
    {
      truths.push_back(ground_truth(task, pref.round));
    }
    RandomStream rng(seed_, StreamTag::behavior, {value_of(pref.worker), pref.round});
    return realize_round_behavior(worker(pref.worker), pref, truths, config_, rng);
  }

  /// The platform-visible view of behavior().
  std::vector<ObservedReport> observe(RoundPreference const &pref) const
  {
    auto full = behavior(pref);
    std::vector<ObservedReport> out;
    out.reserve(full.size());
    for (auto const &r : full)
    {
      out.push_back(r.observed());
    }
    return out;
  }

  /// Dispatches employees to every task in `task_ids` for round t.
  GroundTruthBoard dispatch_employees(std::span<TaskId const> task_ids, Round t) const
  {
    GroundTruthBoard board(t);
    for (auto task : task_ids)
    {
      if (!board.contains(task))
      {
        board.add(ground_truth(task, t));
      }
    }
    return board;
  }

private:
  SimConfig                               config_;
  std::uint64_t                           seed_;
  std::vector<Task>                       tasks_;
  std::vector<WorkerSpec>                 workers_;
  std::shared_ptr<GroundTruthTable const> imported_;
};

}  // namespace crowdbandit
