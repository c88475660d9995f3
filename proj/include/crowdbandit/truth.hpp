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

#include "crowdbandit/bandit.hpp"
#include "crowdbandit/config.hpp"
#include "crowdbandit/types.hpp"
#include "crowdbandit/world.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace crowdbandit {

/// Which reference a verdict was judged against.
enum class Tier
{
  gtd,
  first_etd,
  second_etd
};

inline std::string_view to_string(Tier tier)
{
  switch (tier)
  {
  case Tier::gtd:
    return "gtd";
  case Tier::first_etd:
    return "first-etd";
  case Tier::second_etd:
    return "second-etd";
  }
  return "unknown";
}

struct EtdInput
{
  WorkerId worker{};
  double   value          = 0.0;
  double   initial_lambda = 0.0;  // the reporter's current sample-mean SR
};

struct EtdSettings
{
  double        tol        = 1e-6;
  std::uint32_t max_iters  = 100;
  double        lambda_min = 1e-6;
  double        lambda_max = 1e6;

  static EtdSettings from(SimConfig const &c)
  {
    return {c.etd_tol, c.etd_max_iters, c.lambda_min, c.lambda_max};
  }
};

struct EtdEstimate
{
  TaskId                                task{};
  Round                                 round = 0;
  double                                value = 0.0;
  Tier                                  tier  = Tier::second_etd;
  std::vector<std::pair<WorkerId, double>> authenticity;
  std::uint32_t                         iterations = 0;
  bool                                  converged  = false;
};

struct Verdict
{
  WorkerId worker{};
  TaskId   task{};
  Round    round     = 0;
  bool     accepted  = false;
  Tier     tier      = Tier::gtd;
  double   reference = 0.0;
  double   reported  = 0.0;
  double   threshold = 0.0;
};

struct Thresholds
{
  double eps1 = 1.0;
  double eps2 = 2.5;
  double eps3 = 5.0;

  static Thresholds from(SimConfig const &c)
  {
    return {c.eps1, c.eps2, c.eps3};
  }
};

/**
 * Authenticity-weighted truth estimate.
 *
 * Alternates the weighted mean u = sum(l*v)/sum(l) with the authenticity
 * update l = n / (v - u)^2 (n = number of reporters), clamped to
 * [lambda_min, lambda_max]. The initial weights are the reporters' sample-mean
 * SRs, clamped the same way. Stops when |u_new - u_old| < tol or after
 * max_iters updates.
 */
inline EtdEstimate estimate_etd(TaskId task, Round t, std::span<EtdInput const> reports, Tier tier,
                                EtdSettings const &settings)
{
  if (reports.empty())
  {
    throw std::invalid_argument("estimate_etd: no reporters for task " + std::to_string(value_of(task)));
  }
  auto const n = static_cast<double>(reports.size());
  auto [lo_it, hi_it] = std::minmax_element(reports.begin(), reports.end(),
                                            [](auto const &a, auto const &b) { return a.value < b.value; });
  double const lo = lo_it->value;
  double const hi = hi_it->value;

  std::vector<double> lambda(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i)
  {
    lambda[i] = std::clamp(reports[i].initial_lambda, settings.lambda_min, settings.lambda_max);
  }
  auto weighted_mean = [&] {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i)
    {
      num += lambda[i] * reports[i].value;
      den += lambda[i];
    }
    return std::clamp(num / den, lo, hi);
  };

  EtdEstimate est;
  est.task  = task;
  est.round = t;
  est.tier  = tier;

  double u = weighted_mean();
  while (est.iterations < settings.max_iters)
  {
    for (std::size_t i = 0; i < reports.size(); ++i)
    {
      double const d  = reports[i].value - u;
      double const d2 = d * d;
      lambda[i]       = d2 > 0.0 ? std::clamp(n / d2, settings.lambda_min, settings.lambda_max)
                                 : settings.lambda_max;
    }
    double const next = weighted_mean();
    ++est.iterations;
    bool const done = std::abs(next - u) < settings.tol;
    u               = next;
    if (done)
    {
      est.converged = true;
      break;
    }
  }
  est.value = u;
  est.authenticity.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i)
  {
    est.authenticity.emplace_back(reports[i].worker, lambda[i]);
  }
  return est;
}

/// Estimate from the highly-trustworthy reporters on a task.
inline EtdEstimate estimate_first_etd(TaskId task, Round t, std::span<EtdInput const> trusted_reports,
                                      EtdSettings const &settings)
{
  return estimate_etd(task, t, trusted_reports, Tier::first_etd, settings);
}

/// Estimate from every recruited reporter on a task.
inline EtdEstimate estimate_second_etd(TaskId task, Round t, std::span<EtdInput const> reports,
                                       EtdSettings const &settings)
{
  return estimate_etd(task, t, reports, Tier::second_etd, settings);
}

inline Verdict verify_supervised(ObservedReport const &report, GroundTruth const &gtd, double eps1)
{
  return {report.worker, report.task, report.round, std::abs(report.value - gtd.value) < eps1,
          Tier::gtd,     gtd.value,   report.value, eps1};
}

/// Exploration mode: every report against employee-collected truth.
inline std::vector<Verdict> judge_supervised(std::span<ObservedReport const> reports, GroundTruthBoard const &gtd,
                                             double eps1)
{
  std::vector<Verdict> verdicts;
  verdicts.reserve(reports.size());
  for (auto const &r : reports)
  {
    verdicts.push_back(verify_supervised(r, collect_gtd(r.task, r.round, gtd), eps1));
  }
  return verdicts;
}

/**
 * Exploitation mode. Per task: with at least one trusted reporter, every
 * reporter (trusted ones included) is judged against the first ETD with
 * eps2; otherwise against the second ETD with eps3. `profiles` is indexed by
 * worker slot and supplies the initial authenticity weights. Verdicts come
 * back in report order.
 */
inline std::vector<Verdict> judge_self_supervised(std::span<ObservedReport const> reports, TrustSet const &trusted,
                                                  std::span<WorkerProfile const> profiles, Thresholds const &eps,
                                                  EtdSettings const &settings,
                                                  std::vector<EtdEstimate> *estimates = nullptr)
{
  std::map<std::uint32_t, std::vector<std::size_t>> by_task;
  for (std::size_t k = 0; k < reports.size(); ++k)
  {
    by_task[value_of(reports[k].task)].push_back(k);
  }

  std::vector<Verdict> verdicts(reports.size());
  std::vector<EtdInput> inputs;
  for (auto const &[task_value, members] : by_task)
  {
    auto const task = static_cast<TaskId>(task_value);
    auto const t    = reports[members.front()].round;

    inputs.clear();
    for (auto k : members)
    {
      if (trusted.contains(reports[k].worker))
      {
        inputs.push_back({reports[k].worker, reports[k].value, profiles[slot(reports[k].worker)].sr_mean});
      }
    }
    Tier   tier      = Tier::first_etd;
    double threshold = eps.eps2;
    if (inputs.empty())
    {
      tier      = Tier::second_etd;
      threshold = eps.eps3;
      for (auto k : members)
      {
        inputs.push_back({reports[k].worker, reports[k].value, profiles[slot(reports[k].worker)].sr_mean});
      }
    }
    auto est = estimate_etd(task, t, inputs, tier, settings);
    for (auto k : members)
    {
      auto const &r = reports[k];
      verdicts[k]   = {r.worker, r.task, r.round, std::abs(r.value - est.value) < threshold,
                       tier,     est.value, r.value, threshold};
    }
    if (estimates != nullptr)
    {
      estimates->push_back(std::move(est));
    }
  }
  return verdicts;
}

/// Dispatches on the round mode: supervised when `gtd` is supplied.
inline std::vector<Verdict> judge_round(std::span<ObservedReport const> reports, TrustSet const &trusted,
                                        GroundTruthBoard const *gtd, std::span<WorkerProfile const> profiles,
                                        Thresholds const &eps, EtdSettings const &settings)
{
  if (gtd != nullptr)
  {
    return judge_supervised(reports, *gtd, eps.eps1);
  }
  return judge_self_supervised(reports, trusted, profiles, eps, settings);
}

}  // namespace crowdbandit
