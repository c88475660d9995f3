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
#include "crowdbandit/baselines.hpp"
#include "crowdbandit/config.hpp"
#include "crowdbandit/csv.hpp"
#include "crowdbandit/harness.hpp"
#include "crowdbandit/mechanism.hpp"
#include "crowdbandit/metrics.hpp"
#include "crowdbandit/random.hpp"
#include "crowdbandit/trace.hpp"
#include "crowdbandit/truth.hpp"
#include "crowdbandit/types.hpp"
#include "crowdbandit/world.hpp"
