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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdbandit {

/// 1-based worker identifier.
enum class WorkerId : std::uint32_t
{
};

/// 1-based task identifier.
enum class TaskId : std::uint32_t
{
};

/// 1-based round counter.
using Round = std::uint32_t;

constexpr std::uint32_t value_of(WorkerId id)
{
  return static_cast<std::uint32_t>(id);
}

constexpr std::uint32_t value_of(TaskId id)
{
  return static_cast<std::uint32_t>(id);
}

/// Zero-based slot of an id in a dense vector.
constexpr std::size_t slot(WorkerId id)
{
  return static_cast<std::size_t>(id) - 1;
}

constexpr std::size_t slot(TaskId id)
{
  return static_cast<std::size_t>(id) - 1;
}

constexpr WorkerId worker_at(std::size_t slot_index)
{
  return static_cast<WorkerId>(slot_index + 1);
}

constexpr TaskId task_at(std::size_t slot_index)
{
  return static_cast<TaskId>(slot_index + 1);
}

enum class Phase
{
  exploration,
  exploitation
};

inline std::string_view to_string(Phase phase)
{
  return phase == Phase::exploration ? "exploration" : "exploitation";
}

/// Raised for any invalid configuration value. The message names the field.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace crowdbandit
