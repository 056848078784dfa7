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

#include "polyrdl/harness/exhaustive.hpp"

#include <gtest/gtest.h>

#include <set>

namespace polyrdl::harness {
namespace {

TEST(ExhaustiveTest, CountsEveryOrdering) {
  // 4 candidates, subsets up to size 2: 1 + 4 + 6 subsets, 1 + 4 + 12 orders.
  auto pool = counter_candidates();
  pool.resize(4);
  const auto r = exhaustive_check("tiny", pool, 2);
  EXPECT_EQ(r.subsets, 11u);
  EXPECT_EQ(r.orders, 17u);
  EXPECT_EQ(r.mismatches, 0u);
}

TEST(ExhaustiveTest, CandidatesHaveUniqueIdsAndStamps) {
  for (const auto& pool : {counter_candidates(), set_candidates(), map_candidates(), mixed_candidates(), combined_candidates()}) {
    std::set<UpdateId> ids;
    std::set<std::pair<std::uint64_t, std::string>> stamps;
    for (const auto& u : pool) {
      EXPECT_TRUE(ids.insert(u.id).second);
      EXPECT_TRUE(stamps.insert({u.lamport, u.id.replica_id}).second);
    }
    EXPECT_GE(pool.size(), 10u);
  }
}

TEST(ExhaustiveTest, SetPoolUpToThree) {
  const auto r = exhaustive_check("set", set_candidates(), 3);
  EXPECT_EQ(r.mismatches, 0u) << r.first_mismatch;
}

TEST(ExhaustiveTest, MapPoolUpToThree) {
  const auto r = exhaustive_check("map", map_candidates(), 3);
  EXPECT_EQ(r.mismatches, 0u) << r.first_mismatch;
}

TEST(ExhaustiveTest, MixedPoolUpToThree) {
  const auto r = exhaustive_check("mixed", mixed_candidates(), 3);
  EXPECT_EQ(r.mismatches, 0u) << r.first_mismatch;
}

}  // namespace
}  // namespace polyrdl::harness
