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

#include "crowdbandit/types.hpp"
#include "crowdbandit/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace crowdbandit {

/// Budget accounting. Spending more than what remains is a logic error.
class BudgetLedger
{
public:
  explicit BudgetLedger(double initial)
    : initial_(initial)
    , remaining_(initial)
  {}

  double initial() const
  {
    return initial_;
  }

  double remaining() const
  {
    return remaining_;
  }

  double spent() const
  {
    return std::accumulate(history_.begin(), history_.end(), 0.0);
  }

  std::span<double const> history() const
  {
    return history_;
  }

  bool can_afford(double amount) const
  {
    return amount <= remaining_;
  }

  void spend(double amount)
  {
    if (!(amount >= 0.0) || !can_afford(amount))
    {
      throw std::logic_error("BudgetLedger: round spend exceeds the remaining budget");
    }
    remaining_ -= amount;
    history_.push_back(amount);
  }

private:
  double              initial_;
  double              remaining_;
  std::vector<double> history_;
};

/// One worker's entry in a round's reverse auction.
struct Bid
{
  WorkerId worker{};
  double   mass        = 0.0;  // sum of task weights times the worker's quality index
  double   bid         = 0.0;  // claimed cost
  double   payment_cap = 0.0;  // |D| * c_max
};

struct RankedBid
{
  Bid    entry;
  double ratio = 0.0;  // mass / bid
};

using Ranking = std::vector<RankedBid>;

struct AuctionOutcome
{
  Round                 round = 0;
  Phase                 phase = Phase::exploitation;
  std::vector<WorkerId> winners;
  std::vector<double>   payments;  // aligned with winners
  Ranking               ranking;   // empty in exploration rounds

  double total_payment() const
  {
    return std::accumulate(payments.begin(), payments.end(), 0.0);
  }
};

/// Round-robin block of K workers: ((t-1)K + a - 1) mod N + 1 for a = 1..K.
inline std::vector<WorkerId> exploration_schedule(Round t, std::uint32_t workers, std::uint32_t winners)
{
  if (t < 1 || workers < 1)
  {
    throw std::invalid_argument("exploration_schedule: rounds and worker ids are 1-based");
  }
  std::vector<WorkerId> ids;
  ids.reserve(winners);
  auto const base = static_cast<std::uint64_t>(t - 1) * winners;
  for (std::uint64_t a = 1; a <= winners; ++a)
  {
    ids.push_back(static_cast<WorkerId>((base + a - 1) % workers + 1));
  }
  return ids;
}

/// Exploration pays the worst-case cost |D| * c_max.
inline double exploration_payment(RoundPreference const &pref, double cost_max)
{
  return static_cast<double>(pref.tasks.size()) * cost_max;
}

inline Bid make_bid(RoundPreference const &pref, double weight_sum, double quality_index, double cost_max)
{
  return {pref.worker, weight_sum * quality_index, pref.claimed_cost, exploration_payment(pref, cost_max)};
}

/// Sorts by mass / bid, descending, lower id first on ties. Bids that are not
/// strictly positive are rejected.
inline Ranking rank_by_ratio(std::span<Bid const> bids)
{
  Ranking ranking;
  ranking.reserve(bids.size());
  for (auto const &b : bids)
  {
    if (b.bid > 0.0 && std::isfinite(b.mass))
    {
      ranking.push_back({b, b.mass / b.bid});
    }
  }
  std::sort(ranking.begin(), ranking.end(), [](RankedBid const &x, RankedBid const &y) {
    if (x.ratio != y.ratio)
    {
      return x.ratio > y.ratio;
    }
    return x.entry.worker < y.entry.worker;
  });
  return ranking;
}

/// Top K of the ranking. A (K+1)-th entry must exist to price the winners.
inline std::vector<RankedBid> select_winners(Ranking const &ranking, std::uint32_t winners)
{
  if (winners < 1 || ranking.size() < static_cast<std::size_t>(winners) + 1)
  {
    throw ConfigError("K: ranking needs at least K + 1 valid bidders (N > K)");
  }
  return {ranking.begin(), ranking.begin() + winners};
}

/**
 * Critical payment: the largest bid with which `winner` would still rank
 * ahead of `runner_up`, capped at the winner's |D| * c_max. A runner-up with
 * zero mass cannot outrank anybody, so the cap applies.
 */
inline double critical_payment(RankedBid const &winner, RankedBid const &runner_up)
{
  if (!(runner_up.entry.mass > 0.0))
  {
    return winner.entry.payment_cap;
  }
  double const threshold = winner.entry.mass / runner_up.entry.mass * runner_up.entry.bid;
  return std::min(threshold, winner.entry.payment_cap);
}

/// The uncapped bid threshold above which `winner` drops out of the top K.
inline double critical_bid(RankedBid const &winner, RankedBid const &runner_up)
{
  if (!(runner_up.entry.mass > 0.0))
  {
    return std::numeric_limits<double>::infinity();
  }
  return winner.entry.mass / runner_up.entry.mass * runner_up.entry.bid;
}

/// Ranks, selects K winners and prices each against the (K+1)-th bidder.
inline AuctionOutcome run_reverse_auction(Round t, std::span<Bid const> bids, std::uint32_t winners)
{
  AuctionOutcome out;
  out.round   = t;
  out.phase   = Phase::exploitation;
  out.ranking = rank_by_ratio(bids);
  auto top    = select_winners(out.ranking, winners);
  auto const &runner_up = out.ranking[winners];
  for (auto const &w : top)
  {
    out.winners.push_back(w.entry.worker);
    out.payments.push_back(critical_payment(w, runner_up));
  }
  return out;
}

}  // namespace crowdbandit
