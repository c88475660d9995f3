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

#include "crowdbandit/crowdbandit.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace crowdbandit;

namespace {

struct CommonArgs
{
  std::string                  config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> reps;
  std::string                  out_dir = "out";
  std::string                  algorithms;
};

void add_common(CLI::App *cmd, CommonArgs &args)
{
  cmd->add_option("--config", args.config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Master seed (overrides the config)");
  cmd->add_option("--reps", args.reps, "Replications (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--algorithms", args.algorithms,
                  "Comma list of scmaba, random, <eps>-greedy (default: all four)");
}

SimConfig resolve_config(CommonArgs const &args)
{
  SimConfig c = args.config_path.empty() ? SimConfig{} : load_config(args.config_path);
  if (args.seed)
  {
    c.seed = *args.seed;
  }
  if (args.reps)
  {
    c.replications = *args.reps;
  }
  validate(c);
  return c;
}

std::vector<AlgorithmSpec> resolve_algorithms(CommonArgs const &args)
{
  return args.algorithms.empty() ? default_algorithms() : parse_algorithms(args.algorithms);
}

std::string file_stem(std::string name)
{
  for (auto &ch : name)
  {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return name;
}

std::vector<double> parse_values(std::string const &text)
{
  std::vector<double> values;
  for (auto const &item : detail::split(text, ','))
  {
    values.push_back(detail::parse_double("values", item));
  }
  return values;
}

int cmd_run(CommonArgs const &args)
{
  auto config     = resolve_config(args);
  auto algorithms = resolve_algorithms(args);
  auto const reps = args.reps.value_or(1);
  auto const dir  = prepare_out_dir(args.out_dir);

  auto summary = open_output(dir / "summary.csv");
  csv::write_summary_header(summary, config.sr_buckets.size());
  for (std::uint32_t r = 0; r < reps; ++r)
  {
    World const world(config, replication_seed(config.seed, r));
    auto const  oracle = oracle_revenue(world);
    for (auto const &algo : algorithms)
    {
      RunOptions opts;
      opts.record_profiles = r == 0 && algo.kind == AlgorithmSpec::Kind::scmaba;
      auto trace           = run_algorithm(world, algo, opts);
      auto s               = summarize(trace, world, oracle);
      csv::write_summary_row(summary, s);
      std::cout << std::left << std::setw(12) << s.algorithm << " seed " << s.seed << "  revenue "
                << s.total_revenue << "  regret " << s.regret << "  rounds " << s.total_rounds << "  spend "
                << s.total_spend << '\n';
      if (r != 0)
      {
        continue;
      }
      bool const is_scmaba = algo.kind == AlgorithmSpec::Kind::scmaba;
      auto       os        = open_output(dir / ("trace_" + file_stem(s.algorithm) + ".csv"));
      csv::write_trace(os, trace, !is_scmaba);
      if (is_scmaba)
      {
        auto profiles = open_output(dir / "profiles.csv");
        csv::write_profiles(profiles, trace.snapshots);
        auto verdicts = open_output(dir / "verdicts.csv");
        csv::write_verdicts(verdicts, trace);
      }
    }
  }
  std::cout << "wrote " << (dir / "summary.csv").string() << '\n';
  return 0;
}

int cmd_sweep(CommonArgs const &args, std::string const &param, std::string const &values)
{
  SweepSpec spec;
  spec.param      = param;
  spec.values     = parse_values(values);
  spec.base       = resolve_config(args);
  spec.algorithms = resolve_algorithms(args);
  auto files      = run_experiment(spec, args.out_dir);
  std::cout << "wrote " << files.csv.string() << " and " << files.plot.string() << '\n';
  return 0;
}

int cmd_probe(CommonArgs const &args, std::size_t samples, std::size_t grid)
{
  auto config = resolve_config(args);
  auto dir    = prepare_out_dir(args.out_dir);
  auto os     = open_output(dir / "truthfulness.csv");
  bool best   = true;
  bool shape  = true;
  std::size_t probed = 0;
  std::vector<TruthfulnessRow> rows;
  for (std::uint32_t r = 0; r < config.replications; ++r)
  {
    auto rep = probe_truthfulness(config, r, samples, grid);
    best     = best && rep.truthful_is_best;
    shape    = shape && rep.step_shape;
    probed += rep.winners_probed;
    rows.insert(rows.end(), rep.rows.begin(), rep.rows.end());
  }
  csv::write_truthfulness(os, rows);
  std::cout << "probed " << probed << " winners over " << config.replications << " seeds: truthful bid "
            << (best ? "is" : "is NOT") << " utility-maximizing; step shape " << (shape ? "holds" : "BROKEN")
            << '\n';
  return best && shape ? 0 : 1;
}

int cmd_audit(CommonArgs const &args)
{
  auto config = resolve_config(args);
  auto dir    = prepare_out_dir(args.out_dir);
  std::vector<AuditRow> rows;
  std::size_t           violations = 0;
  for (std::uint32_t r = 0; r < config.replications; ++r)
  {
    auto rep = audit_ir(config, r);
    violations += rep.violations;
    std::cout << "seed " << replication_seed(config.seed, r) << ": mean payment-cost gap exploration "
              << rep.mean_gap_exploration << ", exploitation " << rep.mean_gap_exploitation
              << (rep.exploration_gap_larger ? "" : "  (exploration gap not larger)") << '\n';
    rows.insert(rows.end(), rep.rows.begin(), rep.rows.end());
  }
  auto os = open_output(dir / "audit_ir.csv");
  csv::write_audit(os, rows);
  std::cout << rows.size() << " recruitments audited, " << violations << " with payment < cost\n";
  return violations == 0 ? 0 : 1;
}

int cmd_identify(CommonArgs const &args)
{
  auto config  = resolve_config(args);
  auto dir     = prepare_out_dir(args.out_dir);
  auto points  = open_output(dir / "identification.csv");
  auto summary = open_output(dir / "identification_mae.csv");
  for (std::uint32_t r = 0; r < config.replications; ++r)
  {
    auto rep = emit_identification(config, r);
    csv::write_identification(points, rep, r == 0);
    csv::write_identification_mae(summary, rep, r == 0);
    std::cout << "seed " << rep.seed << ":";
    for (std::size_t b = 0; b < rep.buckets.size(); ++b)
    {
      std::cout << "  mae_b" << b + 1 << ' ' << rep.buckets[b].mae;
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Bandit reverse-auction crowdsensing simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  auto      *run = app.add_subcommand("run", "Run every selected algorithm on one configuration");
  add_common(run, run_args);

  CommonArgs  sweep_args;
  std::string param;
  std::string values;
  auto       *sweep = app.add_subcommand("sweep", "Sweep B, N or K and write <param>_sweep.csv");
  add_common(sweep, sweep_args);
  sweep->add_option("--param", param, "Swept parameter")->required()->check(CLI::IsMember({"B", "N", "K"}));
  sweep->add_option("--values", values, "Comma-separated values")->required();

  CommonArgs  probe_args;
  std::size_t samples = 2;
  std::size_t grid    = 50;
  auto       *probe   = app.add_subcommand("probe-truthfulness", "Replay frozen rounds with misreported costs");
  add_common(probe, probe_args);
  probe->add_option("--samples", samples, "Winners sampled per seed")->capture_default_str();
  probe->add_option("--grid", grid, "Claimed-cost grid points")->capture_default_str()->check(CLI::PositiveNumber);

  CommonArgs audit_args;
  auto      *audit = app.add_subcommand("audit-ir", "Audit payment >= cost for every recruitment");
  add_common(audit, audit_args);

  CommonArgs identify_args;
  auto      *identify = app.add_subcommand("identify", "Learned versus true sensing rates");
  add_common(identify, identify_args);

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*run)
    {
      return cmd_run(run_args);
    }
    if (*sweep)
    {
      return cmd_sweep(sweep_args, param, values);
    }
    if (*probe)
    {
      return cmd_probe(probe_args, samples, grid);
    }
    if (*audit)
    {
      return cmd_audit(audit_args);
    }
    if (*identify)
    {
      return cmd_identify(identify_args);
    }
  }
  catch (ConfigError const &e)
  {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
