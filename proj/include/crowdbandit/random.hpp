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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace crowdbandit {

/// Labels for independent random sub-streams derived from one master seed.
enum class StreamTag : std::uint64_t
{
  tasks = 1,
  population,
  preference,
  behavior,
  ground_truth,
  replication,
  random_selection,
  round_coin,
  probe,
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

/// Folds a tag and a list of coordinates into the master seed.
inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                 std::initializer_list<std::uint64_t> coords = {})
{
  std::uint64_t h = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(tag)));
  for (auto c : coords)
  {
    h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  }
  return h;
}

/// A seeded sampling stream. Reproducible for a given seed on a given
/// standard library.
class RandomStream
{
public:
  explicit RandomStream(std::uint64_t seed)
    : engine_(seed)
  {}

  RandomStream(std::uint64_t master, StreamTag tag, std::initializer_list<std::uint64_t> coords = {})
    : engine_(derive_seed(master, tag, coords))
  {}

  double uniform(double lo, double hi)
  {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  /// Inclusive integer range.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi)
  {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }

  double normal(double mean, double stddev)
  {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  bool bernoulli(double p)
  {
    return uniform(0.0, 1.0) < p;
  }

  std::mt19937_64 &engine()
  {
    return engine_;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace crowdbandit
