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
#include "crowdbandit/truth.hpp"
#include "crowdbandit/types.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace crowdbandit {

struct Recruit
{
  WorkerId            worker{};
  std::vector<TaskId> tasks;
  double              bid       = 0.0;
  double              true_cost = 0.0;
  double              payment   = 0.0;
};

struct RoundRecord
{
  Round                round = 0;
  Phase                phase = Phase::exploration;
  std::vector<Recruit> recruits;
  double               budget_remaining = 0.0;  // after this round's payments
  std::vector<Bid>     book;                    // every bid offered; exploitation only
  std::vector<Verdict> verdicts;

  double spend() const
  {
    return std::accumulate(recruits.begin(), recruits.end(), 0.0,
                           [](double acc, Recruit const &r) { return acc + r.payment; });
  }
};

struct ProfileSnapshot
{
  WorkerId      worker{};
  Round         round   = 0;
  std::uint64_t pulls   = 0;
  double        sr_mean = 0.0;
  double        ucb     = 0.0;
};

struct RunOptions
{
  bool record_profiles = false;  // snapshot every profile after each round
  bool record_verdicts = true;
  bool record_books    = true;
};

/// Everything an algorithm did, round by round. Holds no hidden world state.
struct RunTrace
{
  std::string                algorithm;
  std::uint64_t              seed    = 0;
  double                     budget  = 0.0;
  std::uint32_t              winners = 0;
  std::vector<RoundRecord>   rounds;  // completed rounds only
  std::vector<WorkerProfile> final_profiles;
  std::vector<ProfileSnapshot> snapshots;
  bool                       degenerate = false;  // exploration could not be funded to completion

  double total_spend() const
  {
    return std::accumulate(rounds.begin(), rounds.end(), 0.0,
                           [](double acc, RoundRecord const &r) { return acc + r.spend(); });
  }

  std::size_t count_rounds(Phase phase) const
  {
    return static_cast<std::size_t>(
        std::count_if(rounds.begin(), rounds.end(), [phase](auto const &r) { return r.phase == phase; }));
  }
};

inline void append_snapshots(RunTrace &trace, std::span<WorkerProfile const> profiles, Round t)
{
  for (auto const &p : profiles)
  {
    trace.snapshots.push_back({p.id, t, p.pulls, p.sr_mean, p.ucb});
  }
}

}  // namespace crowdbandit
