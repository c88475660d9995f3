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

#include "crowdbandit/auction.hpp"
#include "crowdbandit/bandit.hpp"
#include "crowdbandit/trace.hpp"
#include "crowdbandit/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace crowdbandit {

/**
 * Weighted count of truthful sensing by recruited workers, using hidden
 * honesty flags rather than the platform's verdicts. `reports_of(worker, t)`
 * yields the full reports of a recruited worker in round t.
 */
template <typename ReportSource, typename WeightOf>
double true_revenue(RunTrace const &trace, ReportSource &&reports_of, WeightOf &&weight_of)
{
  double revenue = 0.0;
  for (auto const &round : trace.rounds)
  {
    for (auto const &recruit : round.recruits)
    {
      for (RoundReport const &report : reports_of(recruit.worker, round.round))
      {
        if (report.honest)
        {
          revenue += weight_of(report.task);
        }
      }
    }
  }
  return revenue;
}

inline double true_revenue(RunTrace const &trace, World const &world)
{
  return true_revenue(
      trace, [&](WorkerId w, Round t) { return world.behavior(world.preference(w, t)); },
      [&](TaskId task) { return world.weight(task); });
}

/// Workers the omniscient oracle would recruit in round t: top K by
/// sum(w) * r / c with true SRs and true costs, lower id on ties.
inline std::vector<RoundPreference> oracle_round_selection(World const &world, Round t)
{
  auto const &cfg = world.config();
  struct Scored
  {
    RoundPreference pref;
    double          score;
  };
  std::vector<Scored> scored;
  scored.reserve(cfg.workers);
  for (auto const &w : world.workers())
  {
    auto p = world.preference(w.id, t);
    auto s = world.weight_sum(p.tasks) * w.expected_sr / p.true_cost;
    scored.push_back({std::move(p), s});
  }
  std::stable_sort(scored.begin(), scored.end(), [](Scored const &a, Scored const &b) { return a.score > b.score; });
  std::vector<RoundPreference> picked;
  for (std::size_t k = 0; k < cfg.winners && k < scored.size(); ++k)
  {
    picked.push_back(std::move(scored[k].pref));
  }
  return picked;
}

/**
 * Revenue of the omniscient per-round greedy that pays true costs, run until
 * a round cannot be funded. Accrues expected revenue sum(w) * r, or realized
 * honesty when `realized` is set.
 */
inline double oracle_revenue(World const &world, bool realized)
{
  BudgetLedger ledger(world.config().budget);
  double       revenue = 0.0;
  for (Round t = 1;; ++t)
  {
    auto   picked = oracle_round_selection(world, t);
    double total  = 0.0;
    for (auto const &p : picked)
    {
      total += p.true_cost;
    }
    if (!(total > 0.0) || !ledger.can_afford(total))
    {
      break;
    }
    ledger.spend(total);
    for (auto const &p : picked)
    {
      if (realized)
      {
        for (auto const &r : world.behavior(p))
        {
          revenue += r.honest ? world.weight(r.task) : 0.0;
        }
      }
      else
      {
        revenue += world.weight_sum(p.tasks) * world.worker(p.worker).expected_sr;
      }
    }
  }
  return revenue;
}

inline double oracle_revenue(World const &world)
{
  return oracle_revenue(world, world.config().oracle_realized);
}

inline double regret(double revenue, double oracle)
{
  return oracle - revenue;
}

inline double utility(double payment, double true_cost, bool recruited)
{
  return recruited ? payment - true_cost : 0.0;
}

struct BucketError
{
  double      mae     = std::numeric_limits<double>::quiet_NaN();  // over pulled members
  std::size_t members = 0;
  std::size_t pulled  = 0;
  std::size_t unpulled = 0;
};

/// Per-bucket mean |sr_mean - r| over workers that were pulled at least once.
inline std::vector<BucketError> identification_error(std::span<WorkerProfile const> profiles,
                                                     std::span<WorkerSpec const> specs, std::size_t buckets)
{
  std::vector<BucketError> out(buckets);
  std::vector<double>      sums(buckets, 0.0);
  for (auto const &spec : specs)
  {
    auto &b = out.at(spec.bucket);
    ++b.members;
    auto const &p = profiles[slot(spec.id)];
    if (!p.explored())
    {
      ++b.unpulled;
      continue;
    }
    ++b.pulled;
    sums[spec.bucket] += std::abs(p.sr_mean - spec.expected_sr);
  }
  for (std::size_t b = 0; b < buckets; ++b)
  {
    if (out[b].pulled > 0)
    {
      out[b].mae = sums[b] / static_cast<double>(out[b].pulled);
    }
  }
  return out;
}

struct RunSummary
{
  std::string              algorithm;
  std::uint64_t            seed    = 0;
  double                   budget  = 0.0;
  std::uint32_t            workers = 0;
  std::uint32_t            tasks   = 0;
  std::uint32_t            winners = 0;
  double                   total_revenue = 0.0;
  double                   oracle        = 0.0;
  double                   regret        = 0.0;
  std::size_t              total_rounds  = 0;
  double                   total_spend   = 0.0;
  std::vector<BucketError> identification;
};

inline RunSummary summarize(RunTrace const &trace, World const &world, double oracle)
{
  auto const &cfg = world.config();
  RunSummary  s;
  s.algorithm      = trace.algorithm;
  s.seed           = trace.seed;
  s.budget         = cfg.budget;
  s.workers        = cfg.workers;
  s.tasks          = cfg.tasks;
  s.winners        = cfg.winners;
  s.total_revenue  = true_revenue(trace, world);
  s.oracle         = oracle;
  s.regret         = regret(s.total_revenue, oracle);
  s.total_rounds   = trace.rounds.size();
  s.total_spend    = trace.total_spend();
  s.identification = identification_error(trace.final_profiles, world.workers(), cfg.sr_buckets.size());
  return s;
}

/// Outcome of checking the budget, cardinality and round-count constraints.
struct InvariantReport
{
  bool        budget_ok      = true;  // cumulative spend <= B, remaining >= 0 at every round
  bool        cardinality_ok = true;  // exactly K distinct recruits per completed round
  bool        rounds_ok      = true;  // T <= B / (K * c_min)
  bool        payments_ok    = true;  // every payment > 0 and >= true cost
  std::string detail;

  bool ok() const
  {
    return budget_ok && cardinality_ok && rounds_ok && payments_ok;
  }
};

inline InvariantReport check_invariants(RunTrace const &trace, SimConfig const &cfg)
{
  InvariantReport rep;
  double          spent = 0.0;
  for (auto const &round : trace.rounds)
  {
    spent += round.spend();
    if (spent > cfg.budget || round.budget_remaining < 0.0)
    {
      rep.budget_ok = false;
      rep.detail += "budget exceeded in round " + std::to_string(round.round) + "; ";
    }
    std::vector<WorkerId> ids;
    for (auto const &r : round.recruits)
    {
      ids.push_back(r.worker);
      if (!(r.payment > 0.0) || r.payment < r.true_cost)
      {
        rep.payments_ok = false;
        rep.detail += "payment below cost in round " + std::to_string(round.round) + "; ";
      }
    }
    std::sort(ids.begin(), ids.end());
    if (ids.size() != cfg.winners || std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    {
      rep.cardinality_ok = false;
      rep.detail += "wrong winner count in round " + std::to_string(round.round) + "; ";
    }
  }
  double const bound = cfg.budget / (static_cast<double>(cfg.winners) * cfg.cost_min);
  if (static_cast<double>(trace.rounds.size()) > bound)
  {
    rep.rounds_ok = false;
    rep.detail += "round count above B/(K c_min); ";
  }
  return rep;
}

}  // namespace crowdbandit
