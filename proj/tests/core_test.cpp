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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/core/replica.hpp"

namespace polyrdl {
namespace {

Update make(std::string rid, std::uint64_t seq, std::uint64_t lamport, std::string object, ObjectType type,
            OpPayload op, std::uint64_t epoch = 0) {
  Update u;
  u.id = {std::move(rid), seq};
  u.lamport = lamport;
  u.epoch = epoch;
  u.object_id = std::move(object);
  u.object_type = type;
  u.op = std::move(op);
  return u;
}

std::int64_t counter_of(const ValueView& v) { return std::get<CounterValue>(v).value; }

TEST(ReplicaTest, FreshReplica) {
  Replica r("A");
  EXPECT_EQ(r.clock(), 0u);
  EXPECT_EQ(r.epoch(), 0u);
  EXPECT_EQ(r.next_seq(), 1u);
  EXPECT_TRUE(r.objects().empty());
  EXPECT_EQ(r.encode_state(), (Bytes{0, 0, 0, 0}));
}

TEST(ReplicaTest, RejectsBadIds) {
  EXPECT_THROW(Replica(""), Error);
  EXPECT_THROW(Replica(std::string(65, 'a')), Error);
  EXPECT_NO_THROW(Replica(std::string(64, 'a')));
}

TEST(ReplicaTest, AccessAbsent) {
  Replica r("A");
  EXPECT_TRUE(std::holds_alternative<AbsentView>(r.access("likes")));
  EXPECT_EQ(counter_of(r.access("likes", ObjectType::kCounter)), 0);
  EXPECT_TRUE(std::get<SetValue>(r.access("s", ObjectType::kSet)).elements.empty());
  EXPECT_TRUE(std::get<MapValue>(r.access("m", ObjectType::kMap)).entries.empty());
  EXPECT_EQ(r.clock(), 0u);
}

TEST(ReplicaTest, CounterArithmetic) {
  Replica r("A");
  r.local_update("likes", ObjectType::kCounter, op::CounterAdd{5});
  r.local_update("likes", ObjectType::kCounter, op::CounterAdd{-2});
  EXPECT_EQ(counter_of(r.access("likes")), 3);
  EXPECT_EQ(r.clock(), 2u);
  EXPECT_EQ(r.next_seq(), 3u);
}

TEST(ReplicaTest, CounterWrapsOnOverflow) {
  Replica r("A");
  r.local_update("c", ObjectType::kCounter, op::CounterAdd{std::numeric_limits<std::int64_t>::max()});
  r.local_update("c", ObjectType::kCounter, op::CounterAdd{1});
  EXPECT_EQ(counter_of(r.access("c")), std::numeric_limits<std::int64_t>::min());
}

TEST(ReplicaTest, SetKeepsOneCopy) {
  Replica a("A"), b("B");
  auto ua = a.local_update("registry", ObjectType::kSet, op::SetAdd{to_bytes("vase")});
  auto ub = b.local_update("registry", ObjectType::kSet, op::SetAdd{to_bytes("vase")});
  a.apply_update(ub);
  b.apply_update(ua);
  const auto va = std::get<SetValue>(a.access("registry"));
  ASSERT_EQ(va.elements.size(), 1u);
  EXPECT_EQ(va.elements[0], to_bytes("vase"));
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(ReplicaTest, NestedCounterInMap) {
  Replica r("A");
  r.local_update("cart", ObjectType::kMap, op::MapCounterAdd{"sku-7", 2});
  const auto m = std::get<MapValue>(r.access("cart"));
  const EntryValue* e = m.find("sku-7");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(std::get<CounterValue>(*e).value, 2);
}

TEST(ReplicaTest, RemoveWithoutTagsIsNoOp) {
  Replica r("A");
  auto u = r.local_update("s", ObjectType::kSet, op::SetRemove{to_bytes("x"), {}});
  EXPECT_EQ(u.id.seq, 1u);
  EXPECT_TRUE(std::get<SetValue>(r.access("s")).elements.empty());
}

TEST(ReplicaTest, KindMismatchLeavesStateAlone) {
  Replica r("A");
  const Digest before = r.digest();
  try {
    r.local_update("c", ObjectType::kSet, op::CounterAdd{1});
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTypeMismatch);
  }
  EXPECT_EQ(r.clock(), 0u);
  EXPECT_EQ(r.next_seq(), 1u);
  EXPECT_EQ(r.digest(), before);
}

TEST(ReplicaTest, LocalResetRefused) {
  Replica r("A");
  try {
    r.local_update("c", ObjectType::kCounter, op::Reset{1, {0, 0, 0, 0}});
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kResetNotAllowed);
  }
}

TEST(ReplicaTest, DuplicateIsIdempotent) {
  Replica a("A"), b("B");
  auto u = a.local_update("c", ObjectType::kCounter, op::CounterAdd{4});
  EXPECT_EQ(b.apply_update(u), ApplyResult::kApplied);
  const Digest d = b.digest();
  EXPECT_EQ(b.apply_update(u), ApplyResult::kDuplicate);
  EXPECT_EQ(b.digest(), d);
  EXPECT_EQ(b.log().size(), 1u);
}

TEST(ReplicaTest, ReceiveRuleAdvancesClock) {
  Replica b("B");
  b.apply_update(make("A", 1, 40, "c", ObjectType::kCounter, op::CounterAdd{1}));
  EXPECT_EQ(b.clock(), 40u);
  auto next = b.local_update("c", ObjectType::kCounter, op::CounterAdd{1});
  EXPECT_EQ(next.lamport, 41u);
  b.apply_update(make("C", 1, 3, "c", ObjectType::kCounter, op::CounterAdd{1}));
  EXPECT_EQ(b.clock(), 41u);
}

TEST(ReplicaTest, MalformedRejected) {
  Replica r("A");
  Update u = make("B", 0, 1, "c", ObjectType::kCounter, op::CounterAdd{1});
  EXPECT_THROW(r.apply_update(u), Error);
  u = make("B", 1, 1, "c", ObjectType::kMap, op::CounterAdd{1});
  EXPECT_THROW(r.apply_update(u), Error);
  u = make("B", 1, 1, "m", ObjectType::kMap, op::MapPut{"k", std::nan("")});
  EXPECT_THROW(r.apply_update(u), Error);
  u = make("B", 1, 1, "x", ObjectType::kCounter, op::Reset{1, {1, 2, 3}}, 1);
  EXPECT_THROW(r.apply_update(u), Error);
  EXPECT_TRUE(r.objects().empty());
  EXPECT_EQ(r.clock(), 0u);
}

TEST(ReplicaTest, MakeFloatRejectsNonFinite) {
  EXPECT_THROW(make_float(std::numeric_limits<double>::infinity()), Error);
  EXPECT_THROW(make_float(std::nan("")), Error);
  EXPECT_NO_THROW(make_float(1.5));
}

TEST(ReplicaTest, AddWinsOverBlindRemove) {
  auto add = make("A", 1, 1, "s", ObjectType::kSet, op::SetAdd{to_bytes("x")});
  auto rem = make("B", 1, 1, "s", ObjectType::kSet, op::SetRemove{to_bytes("x"), {}});
  Replica r1("R1"), r2("R2");
  r1.apply_update(add);
  r1.apply_update(rem);
  r2.apply_update(rem);
  r2.apply_update(add);
  for (const Replica* r : {&r1, &r2}) {
    const auto s = std::get<SetValue>(r->access("s"));
    ASSERT_EQ(s.elements.size(), 1u);
    EXPECT_EQ(s.elements[0], to_bytes("x"));
  }
  EXPECT_EQ(r1.digest(), r2.digest());
}

TEST(ReplicaTest, RemoveBeforeAddConverges) {
  auto add = make("A", 1, 1, "s", ObjectType::kSet, op::SetAdd{to_bytes("x")});
  auto rem = make("B", 1, 2, "s", ObjectType::kSet, op::SetRemove{to_bytes("x"), {{"A", 1}}});
  Replica r1("R1"), r2("R2");
  r1.apply_update(add);
  r1.apply_update(rem);
  r2.apply_update(rem);
  r2.apply_update(add);
  EXPECT_TRUE(std::get<SetValue>(r1.access("s")).elements.empty());
  EXPECT_EQ(r1.digest(), r2.digest());
}

TEST(ReplicaTest, MapTombstoneTripleAllOrders) {
  std::vector<Update> ups = {
      make("A", 1, 5, "m", ObjectType::kMap, op::MapPut{"k", std::int64_t{1}}),
      make("B", 1, 7, "m", ObjectType::kMap, op::MapRemoveKey{"k"}),
      make("A", 2, 9, "m", ObjectType::kMap, op::MapCounterAdd{"k", 3}),
  };
  std::vector<int> order = {0, 1, 2};
  std::optional<Digest> first;
  int runs = 0;
  do {
    Replica r("R");
    for (int i : order) r.apply_update(ups[static_cast<std::size_t>(i)]);
    const auto m = std::get<MapValue>(r.access("m"));
    const EntryValue* e = m.find("k");
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(std::get<CounterValue>(*e).value, 3);
    if (!first) first = r.digest();
    EXPECT_EQ(r.digest(), *first);
    ++runs;
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(runs, 6);
}

TEST(ReplicaTest, RegisterLastWriterWins) {
  auto p1 = make("A", 1, 3, "m", ObjectType::kMap, op::MapPut{"k", std::string("old")});
  auto p2 = make("B", 1, 3, "m", ObjectType::kMap, op::MapPut{"k", std::string("new")});
  Replica r1("R1"), r2("R2");
  r1.apply_update(p1);
  r1.apply_update(p2);
  r2.apply_update(p2);
  r2.apply_update(p1);
  for (const Replica* r : {&r1, &r2}) {
    const auto view = r->access("m");
    const auto* e = std::get<MapValue>(view).find("k");
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(std::get<std::string>(std::get<RegisterValue>(*e).value), "new");
  }
}

TEST(ReplicaTest, TopLevelTypeConflictKeepsNewest) {
  auto c = make("A", 1, 2, "x", ObjectType::kCounter, op::CounterAdd{7});
  auto s = make("B", 1, 4, "x", ObjectType::kSet, op::SetAdd{to_bytes("e")});
  auto c2 = make("A", 2, 3, "x", ObjectType::kCounter, op::CounterAdd{1});
  Replica r1("R1"), r2("R2");
  for (const auto& u : {c, s, c2}) r1.apply_update(u);
  for (const auto& u : {s, c2, c}) r2.apply_update(u);
  EXPECT_TRUE(std::holds_alternative<SetValue>(r1.access("x")));
  EXPECT_EQ(r1.digest(), r2.digest());
}

Bytes snapshot_with_counter(std::int64_t v) {
  Replica s("S");
  s.local_update("c", ObjectType::kCounter, op::CounterAdd{v});
  return s.encode_state();
}

TEST(ReplicaTest, ResetReplacesStateAndPurgesLog) {
  Replica a("A"), b("B");
  auto u = a.local_update("c", ObjectType::kCounter, op::CounterAdd{3});
  b.apply_update(u);
  auto reset = b.issue_reset(snapshot_with_counter(10));
  EXPECT_EQ(reset.epoch, 1u);
  EXPECT_EQ(b.epoch(), 1u);
  EXPECT_EQ(counter_of(b.access("c")), 10);
  ASSERT_EQ(b.log().size(), 1u);
  EXPECT_TRUE(b.log()[0].is_reset());

  auto straggler = a.local_update("c", ObjectType::kCounter, op::CounterAdd{5});
  EXPECT_EQ(b.apply_update(straggler), ApplyResult::kStaleEpoch);
  EXPECT_EQ(counter_of(b.access("c")), 10);

  EXPECT_EQ(a.apply_update(reset), ApplyResult::kApplied);
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(ReplicaTest, FutureEpochIsDeferred) {
  Replica a("A"), b("B");
  auto reset = a.issue_reset(snapshot_with_counter(10));
  auto next = a.local_update("c", ObjectType::kCounter, op::CounterAdd{1});
  EXPECT_EQ(next.epoch, 1u);
  EXPECT_EQ(b.apply_update(next), ApplyResult::kDeferred);
  EXPECT_EQ(b.deferred_count(), 1u);
  EXPECT_EQ(b.apply_update(reset), ApplyResult::kApplied);
  EXPECT_EQ(b.deferred_count(), 0u);
  EXPECT_EQ(counter_of(b.access("c")), 11);
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(ReplicaTest, ConcurrentResetsGreaterStampWins) {
  Replica a("A"), b("B");
  auto ra = a.issue_reset(snapshot_with_counter(1));
  auto rb = b.issue_reset(snapshot_with_counter(2));
  ASSERT_EQ(ra.lamport, rb.lamport);
  a.apply_update(rb);
  b.apply_update(ra);
  EXPECT_EQ(counter_of(a.access("c")), 2);
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(ReplicaTest, ImageRoundTrip) {
  Replica a("A");
  a.local_update("c", ObjectType::kCounter, op::CounterAdd{3});
  a.local_update("m", ObjectType::kMap, op::MapSetAdd{"k", to_bytes("v")});
  a.apply_update(make("B", 3, 9, "c", ObjectType::kCounter, op::CounterAdd{1}));
  Replica b = Replica::from_image(a.image());
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_EQ(a.image(), b.image());
  EXPECT_EQ(b.apply_update(a.log()[1]), ApplyResult::kDuplicate);
}

TEST(ReplicaTest, CommitListenerSeesViews) {
  Replica a("A");
  std::vector<std::pair<std::int64_t, std::int64_t>> seen;
  a.set_commit_listener(
      [&](const Commit& c) {
        ASSERT_NE(c.before, nullptr);
        ASSERT_NE(c.after, nullptr);
        const auto* before = std::get_if<CounterValue>(c.before);
        seen.emplace_back(before ? before->value : -1, counter_of(*c.after));
      },
      true);
  a.local_update("c", ObjectType::kCounter, op::CounterAdd{2});
  a.local_update("c", ObjectType::kCounter, op::CounterAdd{3});
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], std::make_pair(std::int64_t{-1}, std::int64_t{2}));
  EXPECT_EQ(seen[1], std::make_pair(std::int64_t{2}, std::int64_t{5}));
}

TEST(VersionVectorTest, WatermarkAndExtras) {
  VersionVector vv;
  vv.add({"A", 2});
  EXPECT_EQ(vv.watermark("A"), 0u);
  vv.add({"A", 1});
  EXPECT_EQ(vv.watermark("A"), 2u);
  vv.add({"A", 4});
  EXPECT_TRUE(vv.contains({"A", 4}));
  EXPECT_FALSE(vv.contains({"A", 3}));
  vv.add({"A", 3});
  EXPECT_EQ(vv.watermark("A"), 4u);
  EXPECT_TRUE(vv.origins().at("A").extra.empty());
}

TEST(StampTest, OrderIsLamportThenReplicaBytes) {
  EXPECT_LT((LamportStamp{1, "B"}), (LamportStamp{2, "A"}));
  EXPECT_LT((LamportStamp{2, "A"}), (LamportStamp{2, "B"}));
  EXPECT_LT((LamportStamp{2, "Z"}), (LamportStamp{2, "a"}));
}

}  // namespace
}  // namespace polyrdl
