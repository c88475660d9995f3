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
#include "crowdbandit/mechanism.hpp"
#include "crowdbandit/random.hpp"
#include "crowdbandit/trace.hpp"
#include "crowdbandit/world.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace crowdbandit {

struct BaselineConfig
{
  enum class Kind
  {
    random,
    eps_greedy
  };

  Kind   kind    = Kind::random;
  double epsilon = 0.0;  // eps-greedy only

  void validate() const
  {
    if (kind == Kind::eps_greedy && !(epsilon >= 0.0 && epsilon <= 1.0))
    {
      throw ConfigError("epsilon: must lie in [0, 1]");
    }
  }
};

/// "0.3-Greedy" style label.
inline std::string eps_greedy_name(double epsilon)
{
  std::ostringstream os;
  os << epsilon << "-Greedy";
  return os.str();
}

/// K distinct workers drawn uniformly for round t. Allows K == N.
inline std::vector<WorkerId> random_recruits(std::uint64_t seed, Round t, std::uint32_t workers,
                                             std::uint32_t winners)
{
  std::vector<WorkerId> all(workers);
  for (std::size_t i = 0; i < workers; ++i)
  {
    all[i] = worker_at(i);
  }
  RandomStream          rng(seed, StreamTag::random_selection, {t});
  std::vector<WorkerId> picked;
  picked.reserve(winners);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), winners, rng.engine());
  return picked;
}

/// Recruits K random workers every round at |D| * c_max, without learning.
inline RunTrace run_random(World const &world, RunOptions const &opts = {})
{
  auto const  &cfg = world.config();
  BudgetLedger ledger(cfg.budget);
  ProfileBook  book(cfg.workers);
  RunTrace     trace{"Random", world.seed(), cfg.budget, cfg.winners, {}, {}, {}, false};

  for (Round t = 1;; ++t)
  {
    std::vector<RoundPreference> prefs;
    double                       total = 0.0;
    for (auto id : random_recruits(world.seed(), t, cfg.workers, cfg.winners))
    {
      prefs.push_back(world.preference(id, t));
      total += exploration_payment(prefs.back(), cfg.cost_max);
    }
    if (!ledger.can_afford(total))
    {
      break;
    }
    ledger.spend(total);
    RoundRecord rec{t, Phase::exploration, {}, ledger.remaining(), {}, {}};
    for (auto const &p : prefs)
    {
      rec.recruits.push_back({p.worker, p.tasks, p.claimed_cost, p.true_cost, exploration_payment(p, cfg.cost_max)});
    }
    detail::finish_round(trace, std::move(rec), opts, book);
  }
  trace.final_profiles.assign(book.all().begin(), book.all().end());
  return trace;
}

/**
 * Each round explores with probability epsilon (next round-robin block,
 * employee verification, |D| * c_max payments, sample-mean update) and
 * otherwise exploits: top K explored workers by sum(w) * sr_mean / bid at
 * critical payments. Exploitation needs K + 1 explored workers and falls
 * back to exploration until they exist. Exploitation rounds do not learn.
 */
inline RunTrace run_eps_greedy(World const &world, double epsilon, RunOptions const &opts = {})
{
  BaselineConfig{BaselineConfig::Kind::eps_greedy, epsilon}.validate();
  auto const  &cfg = world.config();
  auto const   N   = cfg.workers;
  auto const   K   = cfg.winners;
  BudgetLedger ledger(cfg.budget);
  ProfileBook  book(N);
  RunTrace     trace{eps_greedy_name(epsilon), world.seed(), cfg.budget, K, {}, {}, {}, false};

  Round       blocks_explored = 0;
  std::size_t explored        = 0;
  for (Round t = 1;; ++t)
  {
    RandomStream coin(world.seed(), StreamTag::round_coin, {t});
    bool         explore = coin.uniform(0.0, 1.0) < epsilon;
    if (explored < static_cast<std::size_t>(K) + 1)
    {
      explore = true;
    }

    if (explore)
    {
      std::vector<RoundPreference> prefs;
      double                       total = 0.0;
      for (auto id : exploration_schedule(blocks_explored + 1, N, K))
      {
        prefs.push_back(world.preference(id, t));
        total += exploration_payment(prefs.back(), cfg.cost_max);
      }
      if (!ledger.can_afford(total))
      {
        break;
      }
      ledger.spend(total);
      ++blocks_explored;

      RoundRecord rec{t, Phase::exploration, {}, 0.0, {}, {}};
      rec.verdicts = detail::supervised_round(world, t, prefs, book);
      for (auto const &p : prefs)
      {
        rec.recruits.push_back({p.worker, p.tasks, p.claimed_cost, p.true_cost, exploration_payment(p, cfg.cost_max)});
      }
      explored = static_cast<std::size_t>(
          std::count_if(book.all().begin(), book.all().end(), [](auto const &p) { return p.explored(); }));
      rec.budget_remaining = ledger.remaining();
      detail::finish_round(trace, std::move(rec), opts, book);
      continue;
    }

    std::vector<RoundPreference> prefs;
    std::vector<Bid>             bids;
    for (auto const &profile : book.all())
    {
      if (!profile.explored())
      {
        continue;
      }
      prefs.push_back(world.preference(profile.id, t));
      auto const &p = prefs.back();
      bids.push_back(make_bid(p, world.weight_sum(p.tasks), profile.sr_mean, cfg.cost_max));
    }
    auto outcome = run_reverse_auction(t, bids, K);
    auto total   = outcome.total_payment();
    if (!ledger.can_afford(total))
    {
      break;
    }
    ledger.spend(total);
    RoundRecord rec{t, Phase::exploitation, {}, ledger.remaining(), std::move(bids), {}};
    for (std::size_t k = 0; k < outcome.winners.size(); ++k)
    {
      auto const it = std::find_if(prefs.begin(), prefs.end(),
                                   [&](auto const &p) { return p.worker == outcome.winners[k]; });
      rec.recruits.push_back({it->worker, it->tasks, it->claimed_cost, it->true_cost, outcome.payments[k]});
    }
    detail::finish_round(trace, std::move(rec), opts, book);
  }
  trace.final_profiles.assign(book.all().begin(), book.all().end());
  return trace;
}

}  // namespace crowdbandit
