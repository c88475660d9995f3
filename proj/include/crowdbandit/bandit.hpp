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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace crowdbandit {

/// The platform's learned view of one worker.
struct WorkerProfile
{
  WorkerId      id{};
  std::uint64_t pulls   = 0;    // task-level observations
  double        sr_mean = 0.0;  // weighted success rate
  double        ucb     = std::numeric_limits<double>::infinity();

  bool explored() const
  {
    return pulls > 0;
  }
};

/// A single judged task, as consumed by the sample-mean update.
struct WeightedVerdict
{
  double weight   = 1.0;
  bool   accepted = false;
};

/// Raised when a UCB quantity is requested for a never-pulled worker.
class UndefinedProfileError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

[[nodiscard]] inline WorkerProfile update_counts(WorkerProfile profile, bool recruited, std::size_t pref_size)
{
  if (recruited)
  {
    profile.pulls += pref_size;
  }
  return profile;
}

/// Running weighted mean over the pre-update pull count. Leaves `pulls`
/// untouched; pair with update_counts, or use record_round.
[[nodiscard]] inline WorkerProfile update_sr_mean(WorkerProfile profile, bool recruited,
                                                  std::span<WeightedVerdict const> verdicts)
{
  if (!recruited || verdicts.empty())
  {
    return profile;
  }
  double gained = 0.0;
  for (auto const &v : verdicts)
  {
    gained += v.accepted ? v.weight : 0.0;
  }
  auto const old_pulls = static_cast<double>(profile.pulls);
  profile.sr_mean = (profile.sr_mean * old_pulls + gained) / (old_pulls + static_cast<double>(verdicts.size()));
  return profile;
}

/// Mean first (with the old count), then count.
[[nodiscard]] inline WorkerProfile record_round(WorkerProfile profile, bool recruited,
                                                std::span<WeightedVerdict const> verdicts)
{
  return update_counts(update_sr_mean(profile, recruited, verdicts), recruited, verdicts.size());
}

inline double ucb_bonus(WorkerProfile const &profile, std::uint64_t total_pulls, double delta)
{
  if (profile.pulls == 0)
  {
    throw UndefinedProfileError("ucb_bonus: worker " + std::to_string(value_of(profile.id)) +
                                " has never been pulled");
  }
  if (total_pulls < profile.pulls)
  {
    throw std::invalid_argument("ucb_bonus: total pulls smaller than the worker's own pulls");
  }
  return std::sqrt(delta * std::log(static_cast<double>(total_pulls)) / static_cast<double>(profile.pulls));
}

/// Computes the index and stores it in the profile.
inline double ucb_index(WorkerProfile &profile, std::uint64_t total_pulls, double delta)
{
  profile.ucb = profile.sr_mean + ucb_bonus(profile, total_pulls, delta);
  return profile.ucb;
}

struct TrustSet
{
  Round                 round = 0;
  std::vector<WorkerId> members;  // ascending

  bool contains(WorkerId id) const
  {
    return std::binary_search(members.begin(), members.end(), id);
  }
};

/// Workers whose sample mean is strictly above theta.
inline TrustSet trust_set(std::span<WorkerProfile const> profiles, double theta, Round t = 0)
{
  TrustSet set{t, {}};
  for (auto const &p : profiles)
  {
    if (p.sr_mean > theta)
    {
      set.members.push_back(p.id);
    }
  }
  std::sort(set.members.begin(), set.members.end());
  return set;
}

/// Dense profile store indexed by worker id.
class ProfileBook
{
public:
  explicit ProfileBook(std::size_t workers)
  {
    profiles_.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i)
    {
      profiles_.push_back({worker_at(i)});
    }
  }

  WorkerProfile const &operator[](WorkerId id) const
  {
    return profiles_.at(slot(id));
  }

  std::span<WorkerProfile const> all() const
  {
    return profiles_;
  }

  std::uint64_t total_pulls() const
  {
    return total_pulls_;
  }

  void record(WorkerId id, std::span<WeightedVerdict const> verdicts)
  {
    auto &p = profiles_.at(slot(id));
    p       = record_round(p, true, verdicts);
    total_pulls_ += verdicts.size();
  }

  /// Recomputes every explored worker's index against the current total.
  void refresh_ucb(double delta)
  {
    for (auto &p : profiles_)
    {
      if (p.explored())
      {
        ucb_index(p, total_pulls_, delta);
      }
      else
      {
        p.ucb = std::numeric_limits<double>::infinity();
      }
    }
  }

  bool all_explored() const
  {
    return std::all_of(profiles_.begin(), profiles_.end(), [](auto const &p) { return p.explored(); });
  }

private:
  std::vector<WorkerProfile> profiles_;
  std::uint64_t              total_pulls_ = 0;
};

}  // namespace crowdbandit
