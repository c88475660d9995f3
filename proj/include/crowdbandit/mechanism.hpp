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
#include "crowdbandit/truth.hpp"
#include "crowdbandit/world.hpp"

#include <span>
#include <vector>

namespace crowdbandit {

namespace detail {

inline std::vector<WeightedVerdict> weighted_verdicts(World const &world, std::span<Verdict const> verdicts,
                                                      WorkerId worker)
{
  std::vector<WeightedVerdict> out;
  for (auto const &v : verdicts)
  {
    if (v.worker == worker)
    {
      out.push_back({world.weight(v.task), v.accepted});
    }
  }
  return out;
}

inline std::vector<ObservedReport> observe_all(World const &world, std::span<RoundPreference const> prefs)
{
  std::vector<ObservedReport> reports;
  for (auto const &p : prefs)
  {
    auto r = world.observe(p);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  return reports;
}

inline std::vector<TaskId> task_union(std::span<RoundPreference const> prefs)
{
  std::vector<TaskId> ids;
  for (auto const &p : prefs)
  {
    ids.insert(ids.end(), p.tasks.begin(), p.tasks.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

/// Employees verify every report of the round; the profiles learn from it.
inline std::vector<Verdict> supervised_round(World const &world, Round t, std::span<RoundPreference const> prefs,
                                             ProfileBook &book)
{
  auto reports  = observe_all(world, prefs);
  auto tasks    = task_union(prefs);
  auto board    = world.dispatch_employees(tasks, t);
  auto verdicts = judge_supervised(reports, board, world.config().eps1);
  for (auto const &p : prefs)
  {
    book.record(p.worker, weighted_verdicts(world, verdicts, p.worker));
  }
  return verdicts;
}

inline void finish_round(RunTrace &trace, RoundRecord &&rec, RunOptions const &opts, ProfileBook const &book)
{
  if (!opts.record_verdicts)
  {
    rec.verdicts.clear();
  }
  if (!opts.record_books)
  {
    rec.book.clear();
  }
  if (opts.record_profiles)
  {
    append_snapshots(trace, book.all(), rec.round);
  }
  trace.rounds.push_back(std::move(rec));
}

}  // namespace detail

/**
 * The semi-supervised bandit reverse auction.
 *
 * Exploration: ceil(N/K) round-robin rounds, each recruit paid |D| * c_max
 * and verified against employee-collected truth. If a block cannot be
 * funded the whole run stops and the trace is flagged degenerate.
 *
 * Exploitation: rank every worker by sum(w) * ucb / bid, recruit the top K
 * at critical payments while the budget covers the round, verify through
 * the first/second ETD tiers and refresh profiles and the trusted set.
 */
inline RunTrace run_scmaba(World const &world, RunOptions const &opts = {})
{
  auto const &cfg = world.config();
  auto const  N   = cfg.workers;
  auto const  K   = cfg.winners;

  ProfileBook  book(N);
  BudgetLedger ledger(cfg.budget);
  RunTrace     trace{"SCMABA", world.seed(), cfg.budget, K, {}, {}, {}, false};

  auto const eps      = Thresholds::from(cfg);
  auto const settings = EtdSettings::from(cfg);

  Round       t             = 0;
  Round const explore_until = (N + K - 1) / K;
  while (t < explore_until)
  {
    ++t;
    std::vector<RoundPreference> prefs;
    double                       total = 0.0;
    for (auto id : exploration_schedule(t, N, K))
    {
      prefs.push_back(world.preference(id, t));
      total += exploration_payment(prefs.back(), cfg.cost_max);
    }
    if (!ledger.can_afford(total))
    {
      trace.degenerate = true;
      break;
    }
    ledger.spend(total);

    RoundRecord rec{t, Phase::exploration, {}, 0.0, {}, {}};
    rec.verdicts = detail::supervised_round(world, t, prefs, book);
    book.refresh_ucb(cfg.delta);
    for (auto const &p : prefs)
    {
      rec.recruits.push_back({p.worker, p.tasks, p.claimed_cost, p.true_cost, exploration_payment(p, cfg.cost_max)});
    }
    rec.budget_remaining = ledger.remaining();
    detail::finish_round(trace, std::move(rec), opts, book);
  }

  if (!trace.degenerate)
  {
    auto trusted = trust_set(book.all(), cfg.theta, t);
    while (true)
    {
      ++t;
      std::vector<RoundPreference> all_prefs;
      std::vector<Bid>             bids;
      all_prefs.reserve(N);
      bids.reserve(N);
      for (std::size_t i = 0; i < N; ++i)
      {
        all_prefs.push_back(world.preference(worker_at(i), t));
        auto const &p = all_prefs.back();
        bids.push_back(make_bid(p, world.weight_sum(p.tasks), book[p.worker].ucb, cfg.cost_max));
      }
      auto outcome = run_reverse_auction(t, bids, K);
      auto total   = outcome.total_payment();
      if (!ledger.can_afford(total))
      {
        break;
      }
      ledger.spend(total);

      RoundRecord rec{t, Phase::exploitation, {}, 0.0, std::move(bids), {}};
      std::vector<RoundPreference> prefs;
      for (std::size_t k = 0; k < outcome.winners.size(); ++k)
      {
        auto const &p = all_prefs[slot(outcome.winners[k])];
        prefs.push_back(p);
        rec.recruits.push_back({p.worker, p.tasks, p.claimed_cost, p.true_cost, outcome.payments[k]});
      }
      auto reports = detail::observe_all(world, prefs);
      rec.verdicts = judge_self_supervised(reports, trusted, book.all(), eps, settings);
      for (auto const &p : prefs)
      {
        book.record(p.worker, detail::weighted_verdicts(world, rec.verdicts, p.worker));
      }
      book.refresh_ucb(cfg.delta);
      trusted = trust_set(book.all(), cfg.theta, t);
      rec.budget_remaining = ledger.remaining();
      detail::finish_round(trace, std::move(rec), opts, book);
    }
  }

  trace.final_profiles.assign(book.all().begin(), book.all().end());
  return trace;
}

}  // namespace crowdbandit
