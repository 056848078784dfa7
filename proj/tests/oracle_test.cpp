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

#include "polyrdl/harness/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/replica.hpp"
#include "polyrdl/harness/generators.hpp"

namespace polyrdl::harness {
namespace {

Update make(std::string rid, std::uint64_t seq, std::uint64_t lamport, std::string object, ObjectType type,
            OpPayload op) {
  Update u;
  u.id = {std::move(rid), seq};
  u.lamport = lamport;
  u.object_id = std::move(object);
  u.object_type = type;
  u.op = std::move(op);
  return u;
}

Bytes replay(const std::vector<Update>& ups) {
  Replica r("R");
  for (const auto& u : ups) r.apply_update(u);
  return r.encode_state();
}

TEST(OracleTest, EmptySet) { EXPECT_EQ(oracle_fold({}), (Bytes{0, 0, 0, 0})); }

TEST(OracleTest, CounterSum) {
  std::vector<Update> ups = {make("A", 1, 1, "c", ObjectType::kCounter, op::CounterAdd{5}),
                             make("A", 2, 2, "c", ObjectType::kCounter, op::CounterAdd{-2})};
  auto store = cdf::decode_state(oracle_fold(ups));
  EXPECT_EQ(std::get<core::CounterState>(store.at("c").value).value(), 3);
}

TEST(OracleTest, MapTombstoneTriple) {
  std::vector<Update> ups = {
      make("A", 1, 5, "m", ObjectType::kMap, op::MapPut{"k", std::int64_t{1}}),
      make("B", 1, 7, "m", ObjectType::kMap, op::MapRemoveKey{"k"}),
      make("A", 2, 9, "m", ObjectType::kMap, op::MapCounterAdd{"k", 3}),
  };
  auto store = cdf::decode_state(oracle_fold(ups));
  auto view = resolve(store.at("m"));
  const auto* e = std::get<MapValue>(view).find("k");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(std::get<CounterValue>(*e).value, 3);
  EXPECT_EQ(oracle_fold(ups), replay(ups));
}

TEST(OracleTest, DuplicatesIgnored) {
  auto u = make("A", 1, 1, "c", ObjectType::kCounter, op::CounterAdd{5});
  std::vector<Update> once = {u};
  std::vector<Update> twice = {u, u};
  EXPECT_EQ(oracle_fold(once), oracle_fold(twice));
}

struct PoolCase {
  const char* name;
  PoolOptions opt;
  std::size_t size;
};

class ConfluenceTest : public ::testing::TestWithParam<PoolCase> {};

TEST_P(ConfluenceTest, ShuffledReplayMatchesOracle) {
  const PoolCase& pc = GetParam();
  Rng rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Update> pool = random_pool(rng, pc.size, pc.opt);
    const Bytes expected = oracle_fold(pool);
    for (int order = 0; order < 4; ++order) {
      std::shuffle(pool.begin(), pool.end(), rng);
      ASSERT_EQ(cdf::hex_encode(replay(pool)), cdf::hex_encode(expected)) << "trial " << trial << " order " << order;
    }
  }
}

PoolOptions with_mixed() {
  PoolOptions o;
  o.mixed = {"x"};
  return o;
}

PoolOptions with_resets() {
  PoolOptions o;
  o.mixed = {"x"};
  o.reset_weight = 0.08;
  return o;
}

PoolOptions single_map() {
  PoolOptions o;
  o.counters = {};
  o.sets = {};
  o.max_lamport = 6;
  return o;
}

INSTANTIATE_TEST_SUITE_P(Pools, ConfluenceTest,
                         ::testing::Values(PoolCase{"typed", PoolOptions{}, 24}, PoolCase{"mixed", with_mixed(), 24},
                                           PoolCase{"resets", with_resets(), 30}, PoolCase{"map", single_map(), 12}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(ConfluenceTest, DuplicateDeliveryIsHarmless) {
  Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Update> pool = random_pool(rng, 16, with_resets());
    std::vector<Update> doubled = pool;
    doubled.insert(doubled.end(), pool.begin(), pool.end());
    std::shuffle(doubled.begin(), doubled.end(), rng);
    ASSERT_EQ(replay(doubled), oracle_fold(pool)) << "trial " << trial;
  }
}

TEST(ConfluenceTest, CounterMatchesRecount) {
  Rng rng(8);
  PoolOptions o;
  o.sets = {};
  o.maps = {};
  for (int trial = 0; trial < 100; ++trial) {
    auto pool = random_pool(rng, 40, o);
    std::int64_t sum = 0;
    for (const auto& u : pool) sum += std::get<op::CounterAdd>(u.op).delta;
    Replica r("R");
    for (const auto& u : pool) r.apply_update(u);
    EXPECT_EQ(std::get<CounterValue>(r.access("c")).value, sum);
  }
}

}  // namespace
}  // namespace polyrdl::harness
