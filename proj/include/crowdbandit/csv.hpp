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

#include "crowdbandit/metrics.hpp"
#include "crowdbandit/trace.hpp"
#include "crowdbandit/truth.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

namespace crowdbandit::csv {

/// Shortest round-trip-safe text for a double; "nan"/"inf" for non-finite.
inline std::string num(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void write_trace(std::ostream &os, RunTrace const &trace, bool with_algorithm)
{
  if (with_algorithm)
  {
    os << "algorithm,";
  }
  os << "round,phase,worker_id,recruited,bid,payment,budget_remaining\n";
  auto row = [&](RoundRecord const &r, WorkerId w, bool recruited, double bid, double payment) {
    if (with_algorithm)
    {
      os << trace.algorithm << ',';
    }
    os << r.round << ',' << to_string(r.phase) << ',' << value_of(w) << ',' << (recruited ? 1 : 0) << ','
       << num(bid) << ',' << num(payment) << ',' << num(r.budget_remaining) << '\n';
  };
  for (auto const &r : trace.rounds)
  {
    if (r.book.empty())
    {
      for (auto const &rec : r.recruits)
      {
        row(r, rec.worker, true, rec.bid, rec.payment);
      }
      continue;
    }
    for (auto const &b : r.book)
    {
      auto it = std::find_if(r.recruits.begin(), r.recruits.end(),
                             [&](Recruit const &rec) { return rec.worker == b.worker; });
      bool const won = it != r.recruits.end();
      row(r, b.worker, won, b.bid, won ? it->payment : 0.0);
    }
  }
}

/// Profile snapshots; the ucb field is empty for never-pulled workers.
inline void write_profiles(std::ostream &os, std::span<ProfileSnapshot const> rows)
{
  os << "worker_id,round,pulls,sr_mean,ucb\n";
  for (auto const &s : rows)
  {
    os << value_of(s.worker) << ',' << s.round << ',' << s.pulls << ',' << num(s.sr_mean) << ','
       << (s.pulls > 0 ? num(s.ucb) : std::string()) << '\n';
  }
}

inline void write_verdicts(std::ostream &os, RunTrace const &trace)
{
  os << "round,worker_id,task_id,tier,reference,reported,accepted\n";
  for (auto const &r : trace.rounds)
  {
    for (auto const &v : r.verdicts)
    {
      os << v.round << ',' << value_of(v.worker) << ',' << value_of(v.task) << ',' << to_string(v.tier) << ','
         << num(v.reference) << ',' << num(v.reported) << ',' << (v.accepted ? 1 : 0) << '\n';
    }
  }
}

inline void write_summary_header(std::ostream &os, std::size_t buckets)
{
  os << "algorithm,seed,B,N,M,K,revenue,regret,rounds,spend";
  for (std::size_t b = 0; b < buckets; ++b)
  {
    os << ",mae_b" << b + 1;
  }
  os << '\n';
}

inline void write_summary_row(std::ostream &os, RunSummary const &s)
{
  os << s.algorithm << ',' << s.seed << ',' << num(s.budget) << ',' << s.workers << ',' << s.tasks << ','
     << s.winners << ',' << num(s.total_revenue) << ',' << num(s.regret) << ',' << s.total_rounds << ','
     << num(s.total_spend);
  for (auto const &b : s.identification)
  {
    os << ',' << num(b.mae);
  }
  os << '\n';
}

}  // namespace crowdbandit::csv
