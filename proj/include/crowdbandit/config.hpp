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
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace crowdbandit {

/// One stratum of the expected-sensing-rate population.
struct SrBucket
{
  double lo       = 0.0;
  double hi       = 1.0;
  double fraction = 1.0;

  bool operator==(SrBucket const &) const = default;
};

inline std::vector<SrBucket> default_sr_buckets()
{
  return {{0.8, 1.0, 0.25}, {0.6, 0.8, 0.25}, {0.4, 0.6, 0.25}, {0.0, 0.4, 0.25}};
}

/**
 * All simulation tunables. Defaults reproduce the reference setting:
 * B = 10^4, M = 40, N = 100, K = 10, preferred-task count in [5, 15] and
 * per-task cost in [0.1, 1].
 *
 * The flat key-value file schema uses the key printed next to each field.
 */
struct SimConfig
{
  double        budget    = 1e4;  // B
  std::uint32_t tasks     = 40;   // M
  std::uint32_t workers   = 100;  // N
  std::uint32_t winners   = 10;   // K
  std::uint32_t pref_min  = 5;    // pref_min
  std::uint32_t pref_max  = 15;   // pref_max
  double        cost_min  = 0.1;  // c_min
  double        cost_max  = 1.0;  // c_max

  double delta = 2.0;  // delta
  double theta = 0.8;  // theta

  double eps1 = 1.0;  // eps1
  double eps2 = 2.5;  // eps2
  double eps3 = 5.0;  // eps3

  double value_min    = 0.0;    // value_min
  double value_max    = 100.0;  // value_max
  double base_min     = 10.0;   // base_min
  double base_max     = 90.0;   // base_max
  double truth_jitter = 0.1;    // truth_jitter, relative perturbation of base values
  double sr_jitter    = 0.05;   // sr_jitter, per-round spread around r_i

  double              task_weight = 1.0;  // task_weight, used when task_weights is empty
  std::vector<double> task_weights;       // task_weights, comma separated, one per task

  std::vector<SrBucket> sr_buckets = default_sr_buckets();  // sr_buckets, "lo:hi:fraction,..."

  double        etd_tol       = 1e-6;  // etd_tol
  std::uint32_t etd_max_iters = 100;   // etd_max_iters
  double        lambda_min    = 1e-6;  // lambda_min
  double        lambda_max    = 1e6;   // lambda_max

  std::uint64_t seed         = 1;      // seed
  std::uint32_t replications = 20;     // reps
  bool          oracle_realized = false;  // oracle_realized

  std::string ground_truth_csv;  // ground_truth_csv

  double weight_of(TaskId task) const
  {
    return task_weights.empty() ? task_weight : task_weights.at(slot(task));
  }

  bool operator==(SimConfig const &) const = default;
};

namespace detail {

inline std::string trim(std::string_view s)
{
  auto const first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
  {
    return {};
  }
  auto const last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t              start = 0;
  while (true)
  {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos)
    {
      break;
    }
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string const &key, std::string const &text)
{
  char const *begin = text.c_str();
  char       *end   = nullptr;
  errno             = 0;
  double v          = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || errno == ERANGE || !std::isfinite(v))
  {
    throw ConfigError("config field '" + key + "': expected a real number, got '" + text + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(std::string const &key, std::string const &text)
{
  char const *begin = text.c_str();
  char       *end   = nullptr;
  errno             = 0;
  auto v            = std::strtoull(begin, &end, 10);
  if (text.empty() || text.front() == '-' || end != begin + text.size() || errno == ERANGE)
  {
    throw ConfigError("config field '" + key + "': expected a non-negative integer, got '" + text +
                      "'");
  }
  return v;
}

inline std::uint32_t parse_u32(std::string const &key, std::string const &text)
{
  auto v = parse_u64(key, text);
  if (v > 0xffffffffULL)
  {
    throw ConfigError("config field '" + key + "': value out of range");
  }
  return static_cast<std::uint32_t>(v);
}

inline bool parse_bool(std::string const &key, std::string const &text)
{
  if (text == "true" || text == "1" || text == "yes")
  {
    return true;
  }
  if (text == "false" || text == "0" || text == "no")
  {
    return false;
  }
  throw ConfigError("config field '" + key + "': expected a boolean, got '" + text + "'");
}

}  // namespace detail

/// Throws ConfigError naming the first offending field.
inline void validate(SimConfig const &c)
{
  auto fail = [](std::string const &msg) { throw ConfigError(msg); };

  if (!(c.budget >= 0.0) || !std::isfinite(c.budget))
  {
    fail("B: budget must be a finite non-negative number");
  }
  if (c.tasks < 1)
  {
    fail("M: at least one task is required");
  }
  if (c.winners < 1)
  {
    fail("K: at least one winner per round is required");
  }
  if (c.workers <= c.winners)
  {
    fail("N: worker count must exceed K (N > K) so a (K+1)-th bidder exists");
  }
  if (c.pref_min < 1 || c.pref_min > c.pref_max)
  {
    fail("pref_min: preferred-task range must satisfy 1 <= pref_min <= pref_max");
  }
  if (c.pref_max > c.tasks)
  {
    fail("pref_max: preferred-task count cannot exceed M");
  }
  if (!(c.cost_min > 0.0) || !(c.cost_min < c.cost_max))
  {
    fail("c_min: cost range must satisfy 0 < c_min < c_max");
  }
  if (!(c.delta > 0.0))
  {
    fail("delta: exploration weight must be positive");
  }
  if (!(c.theta >= 0.0 && c.theta <= 1.0))
  {
    fail("theta: trust threshold must lie in [0, 1]");
  }
  if (!(c.eps1 > 0.0))
  {
    fail("eps1: must be positive");
  }
  if (!(c.eps1 < c.eps2 && c.eps2 < c.eps3))
  {
    fail("eps2: verification thresholds must satisfy eps1 < eps2 < eps3");
  }
  if (!(c.value_min < c.value_max))
  {
    fail("value_min: value range must satisfy value_min < value_max");
  }
  if (!(c.value_max - c.value_min > 4.0 * c.eps3))
  {
    fail("value_max: value range too narrow to place a fake report 2*eps3 away from every truth");
  }
  if (!(c.base_min >= c.value_min && c.base_max <= c.value_max && c.base_min <= c.base_max))
  {
    fail("base_min: base value range must lie inside the value range");
  }
  if (!(c.truth_jitter >= 0.0))
  {
    fail("truth_jitter: must be non-negative");
  }
  if (!(c.sr_jitter >= 0.0))
  {
    fail("sr_jitter: must be non-negative");
  }
  if (c.task_weights.empty())
  {
    if (!(c.task_weight > 0.0))
    {
      fail("task_weight: must be positive");
    }
  }
  else
  {
    if (c.task_weights.size() != c.tasks)
    {
      fail("task_weights: expected exactly M entries");
    }
    if (std::any_of(c.task_weights.begin(), c.task_weights.end(), [](double w) { return !(w > 0.0); }))
    {
      fail("task_weights: every weight must be positive");
    }
  }
  if (c.sr_buckets.empty())
  {
    fail("sr_buckets: at least one bucket is required");
  }
  double total = 0.0;
  for (auto const &b : c.sr_buckets)
  {
    if (!(b.lo >= 0.0 && b.lo <= b.hi && b.hi <= 1.0) || !(b.fraction >= 0.0))
    {
      fail("sr_buckets: each bucket needs 0 <= lo <= hi <= 1 and a non-negative fraction");
    }
    total += b.fraction;
  }
  if (std::abs(total - 1.0) > 1e-9)
  {
    fail("sr_buckets: bucket fractions must sum to 1");
  }
  if (!(c.etd_tol > 0.0))
  {
    fail("etd_tol: must be positive");
  }
  if (c.etd_max_iters < 1)
  {
    fail("etd_max_iters: must be at least 1");
  }
  if (!(c.lambda_min > 0.0 && c.lambda_min < c.lambda_max))
  {
    fail("lambda_min: authenticity clamp must satisfy 0 < lambda_min < lambda_max");
  }
  if (c.replications < 1)
  {
    fail("reps: at least one replication is required");
  }
}

/// Applies one `key = value` assignment. Throws ConfigError for unknown keys.
inline void assign(SimConfig &c, std::string const &key, std::string const &value)
{
  using namespace detail;
  if (key == "B") c.budget = parse_double(key, value);
  else if (key == "M") c.tasks = parse_u32(key, value);
  else if (key == "N") c.workers = parse_u32(key, value);
  else if (key == "K") c.winners = parse_u32(key, value);
  else if (key == "pref_min") c.pref_min = parse_u32(key, value);
  else if (key == "pref_max") c.pref_max = parse_u32(key, value);
  else if (key == "c_min") c.cost_min = parse_double(key, value);
  else if (key == "c_max") c.cost_max = parse_double(key, value);
  else if (key == "delta") c.delta = parse_double(key, value);
  else if (key == "theta") c.theta = parse_double(key, value);
  else if (key == "eps1") c.eps1 = parse_double(key, value);
  else if (key == "eps2") c.eps2 = parse_double(key, value);
  else if (key == "eps3") c.eps3 = parse_double(key, value);
  else if (key == "value_min") c.value_min = parse_double(key, value);
  else if (key == "value_max") c.value_max = parse_double(key, value);
  else if (key == "base_min") c.base_min = parse_double(key, value);
  else if (key == "base_max") c.base_max = parse_double(key, value);
  else if (key == "truth_jitter") c.truth_jitter = parse_double(key, value);
  else if (key == "sr_jitter") c.sr_jitter = parse_double(key, value);
  else if (key == "task_weight") c.task_weight = parse_double(key, value);
  else if (key == "task_weights")
  {
    c.task_weights.clear();
    for (auto const &item : split(value, ','))
    {
      c.task_weights.push_back(parse_double(key, item));
    }
  }
  else if (key == "sr_buckets")
  {
    c.sr_buckets.clear();
    for (auto const &item : split(value, ','))
    {
      auto parts = split(item, ':');
      if (parts.size() != 3)
      {
        throw ConfigError("config field 'sr_buckets': expected lo:hi:fraction, got '" + item + "'");
      }
      c.sr_buckets.push_back({parse_double(key, parts[0]), parse_double(key, parts[1]),
                              parse_double(key, parts[2])});
    }
  }
  else if (key == "etd_tol") c.etd_tol = parse_double(key, value);
  else if (key == "etd_max_iters") c.etd_max_iters = parse_u32(key, value);
  else if (key == "lambda_min") c.lambda_min = parse_double(key, value);
  else if (key == "lambda_max") c.lambda_max = parse_double(key, value);
  else if (key == "seed") c.seed = parse_u64(key, value);
  else if (key == "reps") c.replications = parse_u32(key, value);
  else if (key == "oracle_realized") c.oracle_realized = parse_bool(key, value);
  else if (key == "ground_truth_csv") c.ground_truth_csv = value;
  else throw ConfigError("config field '" + key + "': unknown key");
}

/// Parses the flat `key = value` format; '#' starts a comment. Missing keys
/// keep their defaults. The result is validated.
inline SimConfig parse_config(std::istream &in)
{
  SimConfig   c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
    {
      line.erase(hash);
    }
    auto text = detail::trim(line);
    if (text.empty())
    {
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key   = detail::trim(std::string_view(text).substr(0, eq));
    auto value = detail::trim(std::string_view(text).substr(eq + 1));
    if (key.empty())
    {
      throw ConfigError("config line " + std::to_string(line_no) + ": missing key");
    }
    assign(c, key, value);
  }
  validate(c);
  return c;
}

inline SimConfig load_config(std::string const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("config file '" + path + "' cannot be opened");
  }
  return parse_config(in);
}

/// Serializes a config in the same flat format parse_config reads.
inline std::string to_config_text(SimConfig const &c)
{
  std::ostringstream os;
  os.precision(17);
  os << "B = " << c.budget << "\nM = " << c.tasks << "\nN = " << c.workers << "\nK = " << c.winners
     << "\npref_min = " << c.pref_min << "\npref_max = " << c.pref_max << "\nc_min = " << c.cost_min
     << "\nc_max = " << c.cost_max << "\ndelta = " << c.delta << "\ntheta = " << c.theta
     << "\neps1 = " << c.eps1 << "\neps2 = " << c.eps2 << "\neps3 = " << c.eps3
     << "\nvalue_min = " << c.value_min << "\nvalue_max = " << c.value_max
     << "\nbase_min = " << c.base_min << "\nbase_max = " << c.base_max
     << "\ntruth_jitter = " << c.truth_jitter << "\nsr_jitter = " << c.sr_jitter
     << "\ntask_weight = " << c.task_weight << '\n';
  if (!c.task_weights.empty())
  {
    os << "task_weights = ";
    for (std::size_t i = 0; i < c.task_weights.size(); ++i)
    {
      os << (i ? "," : "") << c.task_weights[i];
    }
    os << '\n';
  }
  os << "sr_buckets = ";
  for (std::size_t i = 0; i < c.sr_buckets.size(); ++i)
  {
    auto const &b = c.sr_buckets[i];
    os << (i ? "," : "") << b.lo << ':' << b.hi << ':' << b.fraction;
  }
  os << "\netd_tol = " << c.etd_tol << "\netd_max_iters = " << c.etd_max_iters
     << "\nlambda_min = " << c.lambda_min << "\nlambda_max = " << c.lambda_max
     << "\nseed = " << c.seed << "\nreps = " << c.replications
     << "\noracle_realized = " << (c.oracle_realized ? "true" : "false") << '\n';
  if (!c.ground_truth_csv.empty())
  {
    os << "ground_truth_csv = " << c.ground_truth_csv << '\n';
  }
  return os.str();
}

}  // namespace crowdbandit
