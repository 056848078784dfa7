// Copyright 2026 The polyrdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLYRDL_HARNESS_SCENARIO_HPP_
#define POLYRDL_HARNESS_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polyrdl/harness/workload.hpp"
#include "polyrdl/sync/sync.hpp"

namespace polyrdl::harness {

/// Share of each step kind; they need not sum to one.
struct OpMix {
  double update = 0.7;
  double access = 0.2;
  double sync = 0.1;
  // A replica replaces the whole state with an earlier snapshot of its own.
  double reset = 0.0;
};

struct PartitionSpec {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::vector<std::string> isolate;  // cut from everyone else
};

struct Scenario {
  std::uint64_t seed = 1;
  std::size_t replicas = 3;
  std::size_t ops = 300;
  OpMix mix;
  WorkloadSpec workload;
  std::vector<PartitionSpec> partitions;
  std::uint64_t min_delay = 1;
  std::uint64_t max_delay = 8;
  bool fifo = false;
  // Every replica syncs every this many steps, on top of the mix; 0 is off.
  std::uint64_t sync_every = 0;
};

/// "A".."Z", then "R26", "R27", ...
std::string replica_name(std::size_t i);

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

/// 300..1000 ops, 3 replicas, up to two partitions that all heal.
Scenario random_scenario(std::uint64_t seed);

struct ScenarioResult {
  bool converged = false;      // all digests equal
  bool matches_oracle = false; // and equal to the oracle's
  std::vector<std::string> digests;
  std::string oracle_digest;
  std::vector<sync::MergeReport> reports;  // per replica, summed
  std::size_t updates = 0;                 // distinct updates issued
  std::size_t steps = 0;
  std::string trace_hash;
  std::string failure;  // what differed, when something did

  bool ok() const { return converged && matches_oracle; }
};

/// Runs to quiescence plus a final full sync round over the simulated
/// network. With `trace_out` set the delivery trace is written there when
/// the run fails.
ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& trace_out = {});

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_SCENARIO_HPP_
