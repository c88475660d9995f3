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
#include "crowdbandit/csv.hpp"
#include "crowdbandit/mechanism.hpp"
#include "crowdbandit/metrics.hpp"
#include "oracles.hpp"

#include "gtest/gtest.h"

#include <sstream>

using namespace crowdbandit;

namespace {

double expected_revenue(RunTrace const &trace, World const &world)
{
  double total = 0.0;
  for (auto const &r : trace.rounds)
  {
    for (auto const &rec : r.recruits)
    {
      total += world.weight_sum(rec.tasks) * world.worker(rec.worker).expected_sr;
    }
  }
  return total;
}

RunTrace one_recruit_trace(WorkerId w, Round t)
{
  RunTrace trace;
  trace.rounds.push_back({t, Phase::exploitation, {{w, {}, 1.0, 1.0, 2.0}}, 0.0, {}, {}});
  return trace;
}

std::string summary_line(RunSummary const &s)
{
  std::ostringstream os;
  csv::write_summary_row(os, s);
  return os.str();
}

}  // namespace

TEST(MetricsRevenue, EmptyPolicyIsZero)
{
  World const world(SimConfig{}, 1);
  EXPECT_EQ(true_revenue(RunTrace{}, world), 0.0);
}

TEST(MetricsRevenue, CountsHiddenHonesty)
{
  auto trace = one_recruit_trace(WorkerId{1}, 1);
  auto reports = [](WorkerId w, Round t) {
    std::vector<RoundReport> out;
    for (std::uint32_t j = 1; j <= 5; ++j)
    {
      out.push_back({w, TaskId{j}, t, 10.0 * j, j != 3});
    }
    return out;
  };
  EXPECT_EQ(true_revenue(trace, reports, [](TaskId) { return 1.0; }), 4.0);
  EXPECT_EQ(true_revenue(trace, reports, [](TaskId j) { return value_of(j) == 1 ? 2.0 : 1.0; }), 5.0);
}

TEST(MetricsRevenue, MatchesIndependentRecount)
{
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL})
  {
    World const world(SimConfig{}, seed);
    for (auto const &trace : {run_scmaba(world), run_random(world), run_eps_greedy(world, 0.3)})
    {
      EXPECT_EQ(true_revenue(trace, world), oracle::recount_revenue(trace, world)) << trace.algorithm;
    }
  }
}

TEST(MetricsRevenue, HiddenTruthDiffersFromVerdictsUnderCollusion)
{
  // Three untrusted workers fake the same value on one task; the second ETD
  // accepts them all, the hidden flags say none were truthful.
  std::vector<ObservedReport> observed;
  std::vector<RoundReport>    hidden;
  std::vector<WorkerProfile>  profiles;
  RunTrace                    trace;
  RoundRecord                 round{9, Phase::exploitation, {}, 0.0, {}, {}};
  for (std::uint32_t i = 1; i <= 3; ++i)
  {
    hidden.push_back({WorkerId{i}, TaskId{1}, 9, 70.0, false});
    observed.push_back(hidden.back().observed());
    profiles.push_back({WorkerId{i}, 10, 0.3, 0.9});
    round.recruits.push_back({WorkerId{i}, {TaskId{1}}, 1.0, 1.0, 1.0});
  }
  round.verdicts = judge_self_supervised(observed, TrustSet{}, profiles, Thresholds{}, EtdSettings{});
  trace.rounds.push_back(round);

  double by_verdict = 0.0;
  for (auto const &v : trace.rounds[0].verdicts)
  {
    by_verdict += v.accepted ? 1.0 : 0.0;
  }
  double const by_truth = true_revenue(
      trace,
      [&](WorkerId w, Round) {
        return std::vector<RoundReport>{hidden[slot(w)]};
      },
      [](TaskId) { return 1.0; });
  EXPECT_EQ(by_verdict, 3.0);
  EXPECT_EQ(by_truth, 0.0);
  EXPECT_NE(by_verdict, by_truth);
}

TEST(MetricsOracle, WorthlessPopulation)
{
  SimConfig c;
  c.sr_buckets = {{0.0, 0.0, 1.0}};
  c.sr_jitter  = 0.0;
  World const world(c, 3);
  EXPECT_EQ(oracle_revenue(world), 0.0);
  EXPECT_EQ(oracle_revenue(world, true), 0.0);
}

TEST(MetricsOracle, RoundSelectionMatchesSubsetEnumeration)
{
  for (std::uint64_t seed = 1; seed <= 40; ++seed)
  {
    SimConfig c;
    c.workers = 4 + static_cast<std::uint32_t>(seed % 5);
    c.winners = 1 + static_cast<std::uint32_t>(seed % (c.workers - 1));
    c.tasks   = 20;
    World const world(c, seed);
    Round const t = 1 + static_cast<Round>(seed % 7);

    std::vector<double> scores;
    for (auto const &w : world.workers())
    {
      auto p = world.preference(w.id, t);
      scores.push_back(static_cast<double>(p.tasks.size()) * w.expected_sr / p.true_cost);
    }
    std::vector<std::size_t> best;
    double const             best_score = oracle::best_subset_score(scores, c.winners, &best);

    auto   picked = oracle_round_selection(world, t);
    double total  = 0.0;
    std::vector<std::size_t> slots;
    for (auto const &p : picked)
    {
      total += scores[slot(p.worker)];
      slots.push_back(slot(p.worker));
    }
    std::sort(slots.begin(), slots.end());
    EXPECT_EQ(picked.size(), c.winners);
    EXPECT_NEAR(total, best_score, 1e-12 * best_score);
    EXPECT_EQ(slots, best) << "seed " << seed;
  }
}

TEST(MetricsOracle, DominatesScmabaAndRegretNonNegative)
{
  SimConfig c;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
  {
    World const world(c, seed * 7919);
    RunOptions  opts;
    opts.record_verdicts = false;
    opts.record_books    = false;
    auto const   trace  = run_scmaba(world, opts);
    double const oracle = oracle_revenue(world);
    EXPECT_GE(oracle, expected_revenue(trace, world)) << "seed " << seed;
    auto const s = summarize(trace, world, oracle);
    EXPECT_GE(s.regret, 0.0) << "seed " << seed;
  }
}

TEST(MetricsOracle, RealizedVariant)
{
  World const world(SimConfig{}, 5);
  double const expected = oracle_revenue(world, false);
  double const realized = oracle_revenue(world, true);
  EXPECT_NEAR(realized, expected, 0.03 * expected);
  EXPECT_EQ(realized, std::floor(realized));
}

TEST(MetricsRegret, Identities)
{
  EXPECT_EQ(regret(123.5, 123.5), 0.0);
  EXPECT_EQ(regret(0.0, 99.0), 99.0);
}

TEST(MetricsIdentification, PerfectEstimatesGiveZero)
{
  World const world(SimConfig{}, 3);
  std::vector<WorkerProfile> profiles;
  for (auto const &w : world.workers())
  {
    profiles.push_back({w.id, 10, w.expected_sr, 1.0});
  }
  auto err = identification_error(profiles, world.workers(), 4);
  for (auto const &b : err)
  {
    EXPECT_EQ(b.mae, 0.0);
    EXPECT_EQ(b.members, 25u);
    EXPECT_EQ(b.pulled, 25u);
  }
}

TEST(MetricsIdentification, UnpulledReportedSeparately)
{
  World const world(SimConfig{}, 3);
  std::vector<WorkerProfile> profiles;
  for (auto const &w : world.workers())
  {
    bool const pulled = w.bucket != 2;
    profiles.push_back({w.id, pulled ? 10u : 0u, pulled ? w.expected_sr + 0.1 : 0.0, 1.0});
  }
  auto err = identification_error(profiles, world.workers(), 4);
  EXPECT_NEAR(err[0].mae, 0.1, 1e-12);
  EXPECT_TRUE(std::isnan(err[2].mae));
  EXPECT_EQ(err[2].unpulled, 25u);
  EXPECT_EQ(err[2].pulled, 0u);
}

TEST(MetricsIdentification, BinomialConcentration)
{
  SimConfig c;
  c.sr_jitter = 0.0;
  WorkerSpec const w{WorkerId{1}, 0.7, 1};
  int              close  = 0;
  int const        trials = 300;
  for (int trial = 0; trial < trials; ++trial)
  {
    WorkerProfile p{WorkerId{1}};
    for (Round t = 1; t <= 100; ++t)
    {
      RoundPreference pref{WorkerId{1}, t, {}, {}, 1.0, 1.0};
      std::vector<GroundTruth> truths;
      for (std::uint32_t j = 1; j <= 10; ++j)
      {
        pref.tasks.push_back(TaskId{j});
        truths.push_back({TaskId{j}, t, 50.0});
      }
      RandomStream rng(static_cast<std::uint64_t>(trial), StreamTag::behavior, {t});
      std::vector<WeightedVerdict> verdicts;
      for (auto const &r : realize_round_behavior(w, pref, truths, c, rng))
      {
        verdicts.push_back({1.0, verify_supervised(r.observed(), truths[slot(r.task)], c.eps1).accepted});
      }
      p = record_round(p, true, verdicts);
    }
    ASSERT_EQ(p.pulls, 1000u);
    close += std::abs(p.sr_mean - 0.7) <= 0.05 ? 1 : 0;
  }
  EXPECT_GE(static_cast<double>(close) / trials, 0.99);
}

TEST(MetricsUtility, Examples)
{
  EXPECT_EQ(utility(4.0, 2.5, true), 1.5);
  EXPECT_EQ(utility(4.0, 2.5, false), 0.0);
}

TEST(MetricsUtility, TruthfulRunsAreRational)
{
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
  {
    World const world(SimConfig{}, seed);
    auto        trace = run_scmaba(world);
    for (auto const &r : trace.rounds)
    {
      for (auto const &rec : r.recruits)
      {
        EXPECT_GE(utility(rec.payment, rec.true_cost, true), 0.0);
      }
    }
  }
}

TEST(MetricsSummary, BitIdenticalForSameSeed)
{
  SimConfig c;
  World const a(c, 44);
  World const b(c, 44);
  auto const  sa = summarize(run_scmaba(a), a, oracle_revenue(a));
  auto const  sb = summarize(run_scmaba(b), b, oracle_revenue(b));
  EXPECT_EQ(summary_line(sa), summary_line(sb));
  EXPECT_EQ(sa.total_rounds, sb.total_rounds);
  EXPECT_EQ(sa.regret, sa.oracle - sa.total_revenue);
  EXPECT_LE(sa.total_spend, c.budget);
  EXPECT_GE(sa.total_revenue, 0.0);
}

TEST(MetricsInvariants, DetectsViolations)
{
  SimConfig c = oracle::small_config();
  RunTrace  trace;
  RoundRecord r{1, Phase::exploration, {}, -1.0, {}, {}};
  r.recruits.push_back({WorkerId{1}, {}, 1.0, 2.0, 1000.0});
  trace.rounds.push_back(r);
  auto rep = check_invariants(trace, c);
  EXPECT_FALSE(rep.budget_ok);
  EXPECT_FALSE(rep.cardinality_ok);
  EXPECT_TRUE(rep.payments_ok);
  EXPECT_FALSE(rep.ok());

  RunTrace under;
  RoundRecord u{1, Phase::exploitation, {}, 799.0, {}, {}};
  for (std::uint32_t i = 1; i <= 4; ++i)
  {
    u.recruits.push_back({WorkerId{i}, {}, 1.0, 2.0, 0.25});
  }
  under.rounds.push_back(u);
  auto rep2 = check_invariants(under, c);
  EXPECT_FALSE(rep2.payments_ok);
  EXPECT_TRUE(rep2.cardinality_ok);
}
