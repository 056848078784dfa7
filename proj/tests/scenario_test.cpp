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

#include "polyrdl/harness/scenario.hpp"

#include <gtest/gtest.h>

#include <chrono>

namespace polyrdl::harness {
namespace {

TEST(ScenarioTest, JsonRoundTrip) {
  Scenario s = random_scenario(42);
  s.mix.reset = 0.01;
  s.workload.keys = {"a"};
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
}

TEST(ScenarioTest, DefaultsFillMissingFields) {
  const Scenario s = scenario_from_json(R"({"seed": 9, "ops": 50})");
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.ops, 50u);
  EXPECT_EQ(s.replicas, 3u);
  EXPECT_DOUBLE_EQ(s.mix.update, 0.7);
}

TEST(ScenarioTest, RandomScenariosHeal) {
  for (std::uint64_t seed = 1; seed < 200; ++seed) {
    const Scenario s = random_scenario(seed);
    EXPECT_GE(s.ops, 300u);
    EXPECT_LE(s.ops, 1000u);
    for (const auto& p : s.partitions) EXPECT_LT(p.start, p.end);
  }
}

TEST(ScenarioTest, SingleReplicaMatchesOracle) {
  Scenario s;
  s.seed = 3;
  s.replicas = 1;
  s.ops = 400;
  s.mix.reset = 0.01;
  const ScenarioResult r = run_scenario(s);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_EQ(r.digests.size(), 1u);
}

TEST(ScenarioTest, SameSeedSameRun) {
  const Scenario s = random_scenario(7);
  const ScenarioResult a = run_scenario(s);
  const ScenarioResult b = run_scenario(s);
  EXPECT_EQ(a.trace_hash, b.trace_hash);
  EXPECT_EQ(a.digests, b.digests);
}

TEST(ScenarioTest, SeededRunsConverge) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const ScenarioResult r = run_scenario(random_scenario(seed));
    ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << r.failure;
    EXPECT_GT(r.updates, 0u);
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  RecordProperty("elapsed_ms", static_cast<int>(ms));
}

TEST(ScenarioTest, ResetHeavyRunsConverge) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    Scenario s = random_scenario(seed);
    s.mix.reset = 0.02;
    const ScenarioResult r = run_scenario(s);
    ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << r.failure;
  }
}

TEST(ScenarioTest, LongPartitionConverges) {
  Scenario s;
  s.seed = 3;
  s.ops = 600;
  s.replicas = 4;
  s.partitions = {{0, 500, {"A", "B"}}};
  const ScenarioResult r = run_scenario(s);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_EQ(r.digests.size(), 4u);
}

}  // namespace
}  // namespace polyrdl::harness
