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
#include <sys/socket.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/harness/generators.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/service/node.hpp"
#include "polyrdl/sync/simnet.hpp"
#include "polyrdl/sync/sync.hpp"
#include "polyrdl/sync/tcp.hpp"
#include "test_util.hpp"

namespace polyrdl::sync {
namespace {

using namespace std::chrono_literals;
using harness::Rng;
using polyrdl::testing::TempDir;

void add(Replica& r, std::int64_t d, const std::string& obj = "c") {
  r.local_update(obj, ObjectType::kCounter, op::CounterAdd{d});
}

Update make(std::string rid, std::uint64_t seq, std::uint64_t lamport, std::uint64_t epoch, OpPayload op) {
  Update u;
  u.id = {std::move(rid), seq};
  u.lamport = lamport;
  u.epoch = epoch;
  u.object_id = "c";
  u.object_type = ObjectType::kCounter;
  u.op = std::move(op);
  if (std::holds_alternative<op::Reset>(u.op)) u.object_id = "";
  return u;
}

TEST(SyncTest, FreshReplicaSendsNothing) {
  Replica r("A");
  const auto m = make_sync(r);
  EXPECT_EQ(m.sender, "A");
  EXPECT_TRUE(m.updates.empty());
  EXPECT_TRUE(m.version_vector.empty());
}

TEST(SyncTest, CarriesTheLogSorted) {
  Replica a("A");
  Replica b("B");
  add(b, 1);
  a.apply_update(b.log()[0]);
  add(a, 2);
  add(a, 3);
  const auto m = make_sync(a);
  ASSERT_EQ(m.updates.size(), 3u);
  EXPECT_TRUE(std::is_sorted(m.updates.begin(), m.updates.end(),
                             [](const Update& x, const Update& y) { return x.id < y.id; }));
  EXPECT_EQ(m.updates[0].id, (UpdateId{"A", 1}));
  EXPECT_EQ(m.updates[2].id, (UpdateId{"B", 1}));
  EXPECT_EQ(m.version_vector, (PeerSummary{{"A", 2}, {"B", 1}}));
}

TEST(SyncTest, PeerSummarySkipsKnown) {
  Replica a("A");
  for (int i = 0; i < 5; ++i) add(a, 1);
  PeerSummary peer = {{"A", 3}};
  EXPECT_EQ(make_sync(a, &peer).updates.size(), 2u);
}

TEST(SyncTest, DeltaFromLogPosition) {
  Replica a("A");
  Replica b("B");
  std::size_t sent = 0;
  for (int round = 0; round < 4; ++round) {
    for (int i = 0; i < 3; ++i) add(a, round * 3 + i);
    const auto m = make_sync_from(a, sent);
    EXPECT_EQ(m.updates.size(), 3u);
    sent = a.log().size();
    EXPECT_EQ(merge_sync(b, m).applied, 3u);
  }
  EXPECT_TRUE(make_sync_from(a, sent).updates.empty());
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(MergeTest, OwnBroadcastIsAllDuplicates) {
  Replica a("A");
  for (int i = 0; i < 4; ++i) add(a, i);
  const Digest before = a.digest();
  const auto rep = merge_sync(a, make_sync(a));
  EXPECT_EQ(rep.duplicates, 4u);
  EXPECT_EQ(rep.applied, 0u);
  EXPECT_EQ(a.digest(), before);
}

TEST(MergeTest, DisjointLogsConverge) {
  Rng rng(31);
  harness::PoolOptions opt;
  opt.mixed = {"x"};
  for (int trial = 0; trial < 200; ++trial) {
    auto pool = harness::random_pool(rng, 20, opt);
    Replica a("A");
    Replica b("B");
    for (std::size_t i = 0; i < pool.size(); ++i) (i % 2 ? a : b).apply_update(pool[i]);
    merge_sync(a, make_sync(b));
    merge_sync(b, make_sync(a));
    ASSERT_EQ(a.digest(), b.digest()) << "trial " << trial;
    ASSERT_EQ(a.digest(), harness::oracle_digest(pool)) << "trial " << trial;
  }
}

TEST(MergeTest, ResetInsideBatch) {
  // Batch order is (replica_id, seq): A's update, B's Reset, C's update.
  Replica snap("S");
  add(snap, 100);
  cdf::SyncMessage m;
  m.sender = "X";
  m.updates = {make("A", 1, 1, 0, op::CounterAdd{5}), make("B", 1, 2, 1, op::Reset{1, snap.encode_state()}),
               make("C", 1, 1, 0, op::CounterAdd{7})};
  Replica r("R");
  const auto rep = merge_sync(r, m);
  EXPECT_EQ(rep.applied, 2u);
  EXPECT_EQ(rep.stale, 1u);
  EXPECT_EQ(r.epoch(), 1u);
  EXPECT_EQ(std::get<CounterValue>(r.access("c")).value, 100);
  EXPECT_EQ(r.digest(), harness::oracle_digest(m.updates));
}

TEST(MergeTest, MalformedUpdateStopsTheBatch) {
  cdf::SyncMessage m;
  m.sender = "X";
  Update bad = make("B", 1, 1, 0, op::SetAdd{to_bytes("x")});  // SetAdd on a counter
  m.updates = {make("A", 1, 1, 0, op::CounterAdd{5}), bad, make("C", 1, 1, 0, op::CounterAdd{7})};
  Replica r("R");
  const auto rep = merge_sync(r, m);
  EXPECT_EQ(rep.applied, 1u);
  EXPECT_FALSE(rep.error.empty());
  EXPECT_EQ(std::get<CounterValue>(r.access("c")).value, 5);
}

TEST(MergeTest, FutureEpochWaitsForItsReset) {
  Replica snap("S");
  add(snap, 1);
  const Update reset = make("B", 1, 2, 1, op::Reset{1, snap.encode_state()});
  const Update later = make("A", 1, 3, 1, op::CounterAdd{4});
  Replica r("R");
  cdf::SyncMessage first{"X", 1, {}, {later}};
  EXPECT_EQ(merge_sync(r, first).deferred, 1u);
  cdf::SyncMessage second{"X", 1, {}, {reset}};
  EXPECT_EQ(merge_sync(r, second).applied, 2u);
  EXPECT_EQ(std::get<CounterValue>(r.access("c")).value, 5);
}

TEST(SimNetTest, NothingPendingDeliversZero) {
  SimNetwork net;
  net.attach("A", [](const std::string&, const Bytes&) {});
  EXPECT_EQ(net.step(), 0u);
}

TEST(SimNetTest, PartitionHoldsUntilHeal) {
  PartitionSchedule sched;
  sched.isolate(0, 50, {"B"}, {"A", "B"});
  SimNetwork net(SimOptions{1, 1, 2}, sched);
  std::vector<std::uint64_t> arrivals;
  net.attach("A", [](const std::string&, const Bytes&) {});
  net.attach("B", [&](const std::string&, const Bytes&) { arrivals.push_back(net.now()); });
  net.send("A", "B", Bytes{1});
  net.send("A", "B", Bytes{2});
  for (int i = 0; i < 49; ++i) net.step();
  EXPECT_TRUE(arrivals.empty());
  EXPECT_EQ(net.pending(), 2u);
  net.run_until_idle();
  ASSERT_EQ(arrivals.size(), 2u);
  EXPECT_GE(arrivals[0], 50u);
  EXPECT_EQ(net.delivered(), net.sent());
}

std::string run_trace(std::uint64_t seed) {
  SimNetwork net(SimOptions{seed, 1, 9});
  for (const char* n : {"A", "B", "C"}) net.attach(n, [](const std::string&, const Bytes&) {});
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::string from(1, static_cast<char>('A' + rng() % 3));
    net.broadcast(from, Bytes(rng() % 16, static_cast<std::uint8_t>(i)));
    if (i % 3 == 0) net.step();
  }
  net.run_until_idle();
  return net.trace_hash();
}

TEST(SimNetTest, SameSeedSameTrace) {
  EXPECT_EQ(run_trace(11), run_trace(11));
  EXPECT_NE(run_trace(11), run_trace(12));
}

TEST(SimNetTest, FifoLinksKeepOrder) {
  SimNetwork net(SimOptions{3, 1, 20, true});
  std::vector<std::uint8_t> got;
  net.attach("A", [](const std::string&, const Bytes&) {});
  net.attach("B", [&](const std::string&, const Bytes& f) { got.push_back(f[0]); });
  for (std::uint8_t i = 0; i < 50; ++i) net.send("A", "B", Bytes{i});
  net.run_until_idle();
  ASSERT_EQ(got.size(), 50u);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

struct SimFleet {
  explicit SimFleet(std::vector<std::string> names, SimOptions opt = {}, PartitionSchedule sched = {})
      : net(opt, std::move(sched)) {
    for (const auto& n : names) {
      nodes.push_back(std::make_unique<service::Node>(service::NodeOptions{n}));
      auto* node = nodes.back().get();
      node->set_broadcast([this, n](const Bytes& f) { net.broadcast(n, f); });
      net.attach(n, [node](const std::string&, const Bytes& f) {
        std::span<const std::uint8_t> in(f);
        node->on_frame(cdf::decode_frame(in));
      });
    }
  }
  SimNetwork net;
  std::vector<std::unique_ptr<service::Node>> nodes;
};

TEST(SimNetTest, RingOfThreeConverges) {
  SimFleet fleet({"A", "B", "C"});
  std::vector<Update> all;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 5; ++k) {
      all.push_back(fleet.nodes[i]->update("c", ObjectType::kCounter, op::CounterAdd{i * 10 + k}));
      all.push_back(fleet.nodes[i]->update("s", ObjectType::kSet, op::SetAdd{to_bytes(std::to_string(k))}));
    }
  }
  for (auto& n : fleet.nodes) n->sync();
  fleet.net.run_until_idle();
  for (auto& n : fleet.nodes) EXPECT_EQ(n->digest(), harness::oracle_digest(all)) << n->id();
}

// --- TCP ---------------------------------------------------------------

struct TcpNode {
  TcpNode(const std::string& id, std::uint16_t port, std::vector<HostPort> peers,
          std::optional<std::filesystem::path> dir = std::nullopt)
      : node(service::NodeOptions{id, dir}),
        transport(TcpOptions{{"127.0.0.1", port}, std::move(peers), 20ms, 200ms},
                  [this](const cdf::Frame& f) { node.on_frame(f); }, [this] { return node.sync_frame(); }) {
    node.set_broadcast([this](const Bytes& f) { transport.broadcast(f); });
    transport.start();
  }
  ~TcpNode() { transport.stop(); }
  service::Node node;
  TcpTransport transport;
};

template <class Pred>
bool eventually(Pred p, std::chrono::milliseconds limit = 10s) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (p()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return p();
}

TEST(TcpTest, HostPortParsing) {
  EXPECT_EQ(parse_host_port(":7001").port, 7001);
  EXPECT_EQ(parse_host_port(":7001").host, "127.0.0.1");
  EXPECT_EQ(parse_host_port("localhost:9").port, 9);
  EXPECT_THROW(parse_host_port("nope"), std::exception);
}

TEST(TcpTest, LoopbackConvergence) {
  TcpNode a("A", 0, {});
  for (int i = 0; i < 10; ++i) a.node.update("c", ObjectType::kCounter, op::CounterAdd{1});
  TcpNode b("B", 0, {{"127.0.0.1", a.transport.port()}});
  for (int i = 0; i < 10; ++i) b.node.update("s", ObjectType::kSet, op::SetAdd{to_bytes(std::to_string(i))});
  // The connection greeting alone carries both logs across.
  ASSERT_TRUE(eventually([&] { return a.node.digest() == b.node.digest(); }));
  a.node.update("c", ObjectType::kCounter, op::CounterAdd{5});
  a.node.sync();
  ASSERT_TRUE(eventually([&] { return a.node.digest() == b.node.digest(); }));
  EXPECT_EQ(std::get<CounterValue>(b.node.access("c")).value, 15);
}

TEST(TcpTest, PeerRestartReconverges) {
  TempDir dir;
  TcpNode a("A", 0, {});
  const std::uint16_t a_port = a.transport.port();
  std::uint16_t b_port = 0;
  {
    TcpNode b("B", 0, {{"127.0.0.1", a_port}}, dir.path());
    b_port = b.transport.port();
    b.node.update("c", ObjectType::kCounter, op::CounterAdd{2});
    ASSERT_TRUE(eventually([&] { return a.node.digest() == b.node.digest(); }));
  }
  // B is down; A keeps going.
  for (int i = 0; i < 5; ++i) a.node.update("c", ObjectType::kCounter, op::CounterAdd{1});
  a.node.sync();
  TcpNode b("B", b_port, {{"127.0.0.1", a_port}}, dir.path());
  EXPECT_EQ(std::get<CounterValue>(b.node.access("c")).value, 2);  // recovered from disk
  ASSERT_TRUE(eventually([&] { return a.node.digest() == b.node.digest(); }));
  EXPECT_EQ(std::get<CounterValue>(b.node.access("c")).value, 7);
}

TEST(TcpTest, DialerRetriesUntilPeerAppears) {
  // Reserve a port, release it, and start the listener late.
  const int probe = tcp_listen({"127.0.0.1", 0});
  const std::uint16_t port = local_port(probe);
  close_fd(probe);
  TcpNode b("B", 0, {{"127.0.0.1", port}});
  b.node.update("c", ObjectType::kCounter, op::CounterAdd{3});
  std::this_thread::sleep_for(300ms);
  TcpNode a("A", port, {});
  ASSERT_TRUE(eventually([&] { return a.node.digest() == b.node.digest(); }));
  EXPECT_GE(b.transport.connects(), 1u);
}

TEST(TcpTest, MalformedFrameClosesConnection) {
  TcpNode a("A", 0, {});
  a.node.update("c", ObjectType::kCounter, op::CounterAdd{9});
  const Digest before = a.node.digest();
  const int fd = tcp_connect({"127.0.0.1", a.transport.port()});
  ASSERT_GE(fd, 0);
  ASSERT_TRUE(send_all(fd, cdf::hex_decode("58585858010100000000")));
  // Drain the greeting, then expect EOF.
  std::uint8_t buf[4096];
  ssize_t n;
  bool closed = false;
  const auto end = std::chrono::steady_clock::now() + 5s;
  while (std::chrono::steady_clock::now() < end) {
    n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) {
      closed = true;
      break;
    }
  }
  close_fd(fd);
  EXPECT_TRUE(closed);
  EXPECT_TRUE(eventually([&] { return a.transport.decode_errors() == 1; }));
  EXPECT_EQ(a.node.digest(), before);
}

}  // namespace
}  // namespace polyrdl::sync
