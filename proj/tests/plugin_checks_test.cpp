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

#include "polyrdl/harness/plugin_checks.hpp"

#include <gtest/gtest.h>

namespace polyrdl::harness {
namespace {

TEST(IntegrationCheck, PerPluginCodes) {
  const CheckResult r = check_integration_batch();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(LoggingCheck, EveryAppliedUpdateRecordedOnce) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const CheckResult r = check_logging_completeness(seed, 400);
    EXPECT_TRUE(r.ok) << r.detail;
  }
}

TEST(UndoCheck, EachKindMatchesOracle) {
  const auto results = check_undo_kinds();
  EXPECT_GE(results.size(), 8u);
  for (const auto& r : results) EXPECT_TRUE(r.ok) << r.name << ": " << r.detail;
}

TEST(UndoCheck, Refusals) {
  const CheckResult r = check_undo_refusals();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(RollbackCheck, Simulated) {
  const CheckResult r = check_rollback_sim();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(RollbackCheck, StragglerDiscarded) {
  const CheckResult r = check_rollback_straggler_sim();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(RollbackCheck, Tcp) {
  const CheckResult r = check_rollback_tcp();
  EXPECT_TRUE(r.ok) << r.detail;
}

}  // namespace
}  // namespace polyrdl::harness
