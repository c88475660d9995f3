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

#include "crowdbandit/baselines.hpp"
#include "crowdbandit/config.hpp"
#include "crowdbandit/csv.hpp"
#include "crowdbandit/mechanism.hpp"
#include "crowdbandit/metrics.hpp"
#include "crowdbandit/random.hpp"
#include "crowdbandit/trace.hpp"
#include "crowdbandit/world.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace crowdbandit {

struct AlgorithmSpec
{
  enum class Kind
  {
    scmaba,
    eps_greedy,
    random
  };

  Kind   kind    = Kind::scmaba;
  double epsilon = 0.0;

  std::string name() const
  {
    switch (kind)
    {
    case Kind::scmaba:
      return "SCMABA";
    case Kind::eps_greedy:
      return eps_greedy_name(epsilon);
    case Kind::random:
      return "Random";
    }
    return "unknown";
  }

  bool operator==(AlgorithmSpec const &) const = default;
};

/// SCMABA, 0.3-Greedy, 0.7-Greedy, Random.
inline std::vector<AlgorithmSpec> default_algorithms()
{
  using K = AlgorithmSpec::Kind;
  return {{K::scmaba, 0.0}, {K::eps_greedy, 0.3}, {K::eps_greedy, 0.7}, {K::random, 0.0}};
}

/// Accepts "scmaba", "random" and "<eps>-greedy" (case-insensitive).
inline AlgorithmSpec parse_algorithm(std::string text)
{
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char ch) { return std::tolower(ch); });
  text = detail::trim(text);
  if (text == "scmaba")
  {
    return {AlgorithmSpec::Kind::scmaba, 0.0};
  }
  if (text == "random")
  {
    return {AlgorithmSpec::Kind::random, 0.0};
  }
  constexpr std::string_view suffix = "-greedy";
  if (text.size() > suffix.size() && text.ends_with(suffix))
  {
    auto eps = detail::parse_double("algorithms", text.substr(0, text.size() - suffix.size()));
    AlgorithmSpec spec{AlgorithmSpec::Kind::eps_greedy, eps};
    BaselineConfig{BaselineConfig::Kind::eps_greedy, eps}.validate();
    return spec;
  }
  throw ConfigError("algorithms: unknown algorithm '" + text + "'");
}

inline std::vector<AlgorithmSpec> parse_algorithms(std::string const &list)
{
  std::vector<AlgorithmSpec> out;
  for (auto const &item : detail::split(list, ','))
  {
    out.push_back(parse_algorithm(item));
  }
  return out;
}

inline RunTrace run_algorithm(World const &world, AlgorithmSpec const &algo, RunOptions const &opts = {})
{
  switch (algo.kind)
  {
  case AlgorithmSpec::Kind::scmaba:
    return run_scmaba(world, opts);
  case AlgorithmSpec::Kind::eps_greedy:
    return run_eps_greedy(world, algo.epsilon, opts);
  case AlgorithmSpec::Kind::random:
    return run_random(world, opts);
  }
  throw std::logic_error("run_algorithm: unknown algorithm");
}

/// World seed of replication r under a master seed.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint32_t replication)
{
  return derive_seed(master, StreamTag::replication, {replication});
}

/// Runs `job(i)` for i in [0, count) on up to hardware_concurrency threads.
inline void parallel_for(std::size_t count, std::function<void(std::size_t)> const &job, unsigned threads = 0)
{
  if (threads == 0)
  {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      job(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr       failure;
  std::mutex               failure_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w)
  {
    pool.emplace_back([&] {
      for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      {
        try
        {
          job(i);
        }
        catch (...)
        {
          std::lock_guard lock(failure_mutex);
          if (!failure)
          {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  pool.clear();
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

struct RunResult
{
  RunSummary      summary;
  InvariantReport invariants;
};

/// Every algorithm on one world, with a shared oracle.
inline std::vector<RunResult> run_replication(SimConfig const &config, std::uint32_t replication,
                                              std::span<AlgorithmSpec const> algorithms)
{
  World const world(config, replication_seed(config.seed, replication));
  auto const  oracle = oracle_revenue(world);
  RunOptions  opts;
  opts.record_verdicts = false;
  opts.record_books    = false;
  std::vector<RunResult> out;
  for (auto const &algo : algorithms)
  {
    auto trace = run_algorithm(world, algo, opts);
    out.push_back({summarize(trace, world, oracle), check_invariants(trace, config)});
  }
  return out;
}

struct SweepSpec
{
  std::string                param;  // "B", "N" or "K"
  std::vector<double>        values;
  SimConfig                  base;
  std::vector<AlgorithmSpec> algorithms = default_algorithms();
};

inline SimConfig instantiate(SweepSpec const &spec, double value)
{
  SimConfig c = spec.base;
  auto as_count = [&](char const *field) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 4294967295.0)
    {
      throw ConfigError(std::string(field) + ": sweep value must be a positive integer");
    }
    return static_cast<std::uint32_t>(value);
  };
  if (spec.param == "B")
  {
    c.budget = value;
  }
  else if (spec.param == "N")
  {
    c.workers = as_count("N");
  }
  else if (spec.param == "K")
  {
    c.winners = as_count("K");
  }
  else
  {
    throw ConfigError("param: sweep parameter must be one of B, N, K");
  }
  validate(c);
  return c;
}

/// Fail-fast check of every sweep point before anything runs.
inline void validate(SweepSpec const &spec)
{
  if (spec.values.empty())
  {
    throw ConfigError("values: sweep needs at least one value");
  }
  if (spec.algorithms.empty())
  {
    throw ConfigError("algorithms: sweep needs at least one algorithm");
  }
  for (auto v : spec.values)
  {
    (void)instantiate(spec, v);
  }
}

struct SweepRow
{
  double        value       = 0.0;
  std::uint32_t replication = 0;
  RunResult     result;
};

/// Rows ordered by value, then replication, then algorithm.
inline std::vector<SweepRow> run_sweep(SweepSpec const &spec, unsigned threads = 0)
{
  validate(spec);
  auto const reps = spec.base.replications;
  std::vector<std::vector<RunResult>> cells(spec.values.size() * reps);
  parallel_for(
      cells.size(),
      [&](std::size_t i) {
        auto const v = i / reps;
        auto const r = static_cast<std::uint32_t>(i % reps);
        cells[i]     = run_replication(instantiate(spec, spec.values[v]), r, spec.algorithms);
      },
      threads);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    for (auto &res : cells[i])
    {
      rows.push_back({spec.values[i / reps], static_cast<std::uint32_t>(i % reps), std::move(res)});
    }
  }
  return rows;
}

/// Script for an external plotting tool: mean +- stderr of revenue and regret.
inline std::string plot_script(std::string const &csv_name, std::string const &param)
{
  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "# Renders mean +- stderr of revenue and regret against " + param + ".\n";
  s += "import csv, math, sys\n";
  s += "from collections import defaultdict\n";
  s += "import matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
  s += "path = sys.argv[1] if len(sys.argv) > 1 else '" + csv_name + "'\n";
  s += "groups = defaultdict(lambda: defaultdict(list))\n";
  s += "with open(path) as fh:\n";
  s += "    for row in csv.DictReader(fh):\n";
  s += "        key = float(row['" + param + "'])\n";
  s += "        groups[row['algorithm']][key].append((float(row['revenue']), float(row['regret'])))\n\n";
  s += "def stats(xs):\n";
  s += "    m = sum(xs) / len(xs)\n";
  s += "    if len(xs) < 2:\n        return m, 0.0\n";
  s += "    var = sum((x - m) ** 2 for x in xs) / (len(xs) - 1)\n";
  s += "    return m, math.sqrt(var / len(xs))\n\n";
  s += "fig, axes = plt.subplots(1, 2, figsize=(11, 4))\n";
  s += "for col, label in ((0, 'revenue'), (1, 'regret')):\n";
  s += "    for algo, points in groups.items():\n";
  s += "        xs = sorted(points)\n";
  s += "        ms, es = zip(*(stats([p[col] for p in points[x]]) for x in xs))\n";
  s += "        axes[col].errorbar(xs, ms, yerr=es, marker='o', capsize=3, label=algo)\n";
  s += "    axes[col].set_xlabel('" + param + "')\n";
  s += "    axes[col].set_ylabel(label)\n";
  s += "    axes[col].legend()\n";
  s += "fig.tight_layout()\n";
  s += "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=120)\n";
  return s;
}

struct ExperimentFiles
{
  std::filesystem::path csv;
  std::filesystem::path plot;
};

inline std::ofstream open_output(std::filesystem::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

inline std::filesystem::path prepare_out_dir(std::filesystem::path const &dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
  {
    throw std::runtime_error("output directory '" + dir.string() + "' is not writable");
  }
  return dir;
}

/// Runs a sweep and writes `<param>_sweep.csv` plus a plot script.
inline ExperimentFiles run_experiment(SweepSpec const &spec, std::filesystem::path const &out_dir,
                                      std::vector<SweepRow> *rows_out = nullptr, unsigned threads = 0)
{
  validate(spec);
  prepare_out_dir(out_dir);
  auto rows = run_sweep(spec, threads);

  ExperimentFiles files{out_dir / (spec.param + "_sweep.csv"), out_dir / (spec.param + "_sweep_plot.py")};
  {
    auto os = open_output(files.csv);
    csv::write_summary_header(os, spec.base.sr_buckets.size());
    for (auto const &row : rows)
    {
      csv::write_summary_row(os, row.result.summary);
    }
  }
  {
    auto os = open_output(files.plot);
    os << plot_script(files.csv.filename().string(), spec.param);
  }
  if (rows_out != nullptr)
  {
    *rows_out = std::move(rows);
  }
  return files;
}

// ---------------------------------------------------------------------------
// Mechanism probes

struct TruthfulnessRow
{
  std::uint64_t seed = 0;
  Round         round = 0;
  WorkerId      worker{};
  double        true_cost        = 0.0;
  double        claimed_cost     = 0.0;
  bool          recruited        = false;
  double        payment          = 0.0;
  double        utility          = 0.0;
  double        truthful_utility = 0.0;
  double        critical_bid     = 0.0;
};

struct TruthfulnessReport
{
  std::vector<TruthfulnessRow> rows;
  std::size_t                  winners_probed = 0;
  bool                         truthful_is_best = true;  // utility(claimed) <= utility(true cost) everywhere
  bool                         step_shape       = true;  // plateau below the critical bid, zero above
};

/// Replays one frozen exploitation round with `worker`'s claimed cost set to `claimed`.
inline AuctionOutcome replay_with_bid(RoundRecord const &frozen, WorkerId worker, double claimed,
                                      std::uint32_t winners)
{
  auto book = frozen.book;
  for (auto &b : book)
  {
    if (b.worker == worker)
    {
      b.bid = claimed;
    }
  }
  return run_reverse_auction(frozen.round, book, winners);
}

/**
 * Runs SCMABA on replication `replication`, samples `samples` (round, winner)
 * pairs from its exploitation rounds and sweeps the winner's claimed cost
 * over `grid_points` values spanning both sides of its critical bid.
 */
inline TruthfulnessReport probe_truthfulness(SimConfig const &config, std::uint32_t replication,
                                             std::size_t samples, std::size_t grid_points)
{
  auto const  seed = replication_seed(config.seed, replication);
  World const world(config, seed);
  auto const  trace = run_scmaba(world);

  std::vector<RoundRecord const *> frozen;
  for (auto const &r : trace.rounds)
  {
    if (r.phase == Phase::exploitation && !r.book.empty())
    {
      frozen.push_back(&r);
    }
  }
  if (frozen.empty())
  {
    throw std::runtime_error("probe-truthfulness: the run never reached an exploitation round");
  }

  TruthfulnessReport report;
  RandomStream       rng(seed, StreamTag::probe);
  auto const         K = config.winners;
  for (std::size_t s = 0; s < samples; ++s)
  {
    auto const &round   = *frozen[rng.uniform_int(0, frozen.size() - 1)];
    auto const &recruit = round.recruits[rng.uniform_int(0, round.recruits.size() - 1)];
    double const cost   = recruit.true_cost;

    auto truthful   = replay_with_bid(round, recruit.worker, cost, K);
    auto const pos  = std::find(truthful.winners.begin(), truthful.winners.end(), recruit.worker);
    if (pos == truthful.winners.end())
    {
      throw std::logic_error("probe-truthfulness: frozen winner lost its own round on replay");
    }
    double const truthful_pay  = truthful.payments[static_cast<std::size_t>(pos - truthful.winners.begin())];
    double const truthful_util = utility(truthful_pay, cost, true);
    auto const   mine = std::find_if(truthful.ranking.begin(), truthful.ranking.end(),
                                     [&](RankedBid const &b) { return b.entry.worker == recruit.worker; });
    double const threshold = critical_bid(*mine, truthful.ranking[K]);

    double const hi = 2.0 * (std::isfinite(threshold) ? std::max(threshold, cost) : 2.0 * recruit.payment);
    double const lo = 0.25 * cost;
    for (std::size_t g = 0; g < grid_points; ++g)
    {
      double const claimed =
          grid_points == 1 ? cost : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
      auto         outcome = replay_with_bid(round, recruit.worker, claimed, K);
      auto const   it      = std::find(outcome.winners.begin(), outcome.winners.end(), recruit.worker);
      bool const   won     = it != outcome.winners.end();
      double const pay     = won ? outcome.payments[static_cast<std::size_t>(it - outcome.winners.begin())] : 0.0;
      double const util    = utility(pay, cost, won);

      report.rows.push_back(
          {seed, round.round, recruit.worker, cost, claimed, won, pay, util, truthful_util, threshold});
      if (util > truthful_util)
      {
        report.truthful_is_best = false;
      }
      if (claimed < threshold && !(won && pay == truthful_pay))
      {
        report.step_shape = false;
      }
      if (claimed > threshold && (won || util != 0.0))
      {
        report.step_shape = false;
      }
    }
    ++report.winners_probed;
  }
  return report;
}

struct AuditRow
{
  std::uint64_t seed = 0;
  Round         round = 0;
  Phase         phase = Phase::exploration;
  WorkerId      worker{};
  double        cost    = 0.0;
  double        payment = 0.0;
};

struct AuditReport
{
  std::vector<AuditRow> rows;
  std::size_t           violations            = 0;  // rows with payment < cost
  double                mean_gap_exploration  = 0.0;
  double                mean_gap_exploitation = 0.0;
  bool                  exploration_gap_larger = false;
};

/// One row per recruited worker per round of a SCMABA run.
inline AuditReport audit_ir(SimConfig const &config, std::uint32_t replication)
{
  auto const  seed = replication_seed(config.seed, replication);
  World const world(config, seed);
  RunOptions  opts;
  opts.record_verdicts = false;
  auto const trace     = run_scmaba(world, opts);

  AuditReport report;
  double      gap[2]   = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (auto const &r : trace.rounds)
  {
    for (auto const &rec : r.recruits)
    {
      report.rows.push_back({seed, r.round, r.phase, rec.worker, rec.true_cost, rec.payment});
      if (rec.payment < rec.true_cost)
      {
        ++report.violations;
      }
      auto const k = r.phase == Phase::exploration ? 0 : 1;
      gap[k] += rec.payment - rec.true_cost;
      ++count[k];
    }
  }
  report.mean_gap_exploration  = count[0] ? gap[0] / static_cast<double>(count[0]) : 0.0;
  report.mean_gap_exploitation = count[1] ? gap[1] / static_cast<double>(count[1]) : 0.0;
  report.exploration_gap_larger = count[0] > 0 && count[1] > 0 &&
                                  report.mean_gap_exploration > report.mean_gap_exploitation;
  return report;
}

struct IdentificationRow
{
  WorkerId              worker{};
  std::size_t           bucket  = 0;
  double                true_sr = 0.0;
  std::optional<double> estimated_sr;  // absent for never-pulled workers
  std::uint64_t         pulls = 0;
};

struct IdentificationReport
{
  std::uint64_t                  seed = 0;
  std::vector<IdentificationRow> rows;
  std::vector<BucketError>       buckets;
};

inline IdentificationReport identification_from(RunTrace const &trace, World const &world)
{
  IdentificationReport report;
  report.seed = world.seed();
  for (auto const &spec : world.workers())
  {
    auto const &p = trace.final_profiles.at(slot(spec.id));
    report.rows.push_back({spec.id, spec.bucket, spec.expected_sr,
                           p.explored() ? std::optional<double>(p.sr_mean) : std::nullopt, p.pulls});
  }
  report.buckets = identification_error(trace.final_profiles, world.workers(), world.config().sr_buckets.size());
  return report;
}

inline IdentificationReport emit_identification(SimConfig const &config, std::uint32_t replication)
{
  World const world(config, replication_seed(config.seed, replication));
  RunOptions  opts;
  opts.record_verdicts = false;
  opts.record_books    = false;
  return identification_from(run_scmaba(world, opts), world);
}

namespace csv {

inline void write_truthfulness(std::ostream &os, std::span<TruthfulnessRow const> rows)
{
  os << "seed,round,worker_id,true_cost,claimed_cost,recruited,payment,utility,truthful_utility,critical_bid\n";
  for (auto const &r : rows)
  {
    os << r.seed << ',' << r.round << ',' << value_of(r.worker) << ',' << num(r.true_cost) << ','
       << num(r.claimed_cost) << ',' << (r.recruited ? 1 : 0) << ',' << num(r.payment) << ',' << num(r.utility)
       << ',' << num(r.truthful_utility) << ',' << num(r.critical_bid) << '\n';
  }
}

inline void write_audit(std::ostream &os, std::span<AuditRow const> rows)
{
  os << "seed,round,phase,worker_id,cost,payment\n";
  for (auto const &r : rows)
  {
    os << r.seed << ',' << r.round << ',' << to_string(r.phase) << ',' << value_of(r.worker) << ','
       << num(r.cost) << ',' << num(r.payment) << '\n';
  }
}

inline void write_identification(std::ostream &os, IdentificationReport const &report, bool header = true)
{
  if (header)
  {
    os << "seed,worker_id,bucket,true_sr,estimated_sr,pulls\n";
  }
  for (auto const &r : report.rows)
  {
    os << report.seed << ',' << value_of(r.worker) << ',' << r.bucket + 1 << ',' << num(r.true_sr) << ','
       << (r.estimated_sr ? num(*r.estimated_sr) : std::string()) << ',' << r.pulls << '\n';
  }
}

inline void write_identification_mae(std::ostream &os, IdentificationReport const &report, bool header = true)
{
  if (header)
  {
    os << "seed,bucket,members,pulled,unpulled,mae\n";
  }
  for (std::size_t b = 0; b < report.buckets.size(); ++b)
  {
    auto const &e = report.buckets[b];
    os << report.seed << ',' << b + 1 << ',' << e.members << ',' << e.pulled << ',' << e.unpulled << ','
       << num(e.mae) << '\n';
  }
}

}  // namespace csv

}  // namespace crowdbandit
