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

#include <fstream>
#include <thread>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/plugin/descriptor.hpp"
#include "polyrdl/plugin/endpoint.hpp"
#include "polyrdl/plugin/manager.hpp"
#include "polyrdl/plugins/logging.hpp"
#include "polyrdl/plugins/rollback.hpp"
#include "polyrdl/plugins/undo.hpp"
#include "polyrdl/service/host.hpp"
#include "polyrdl/sync/sync.hpp"
#include "polyrdl/sync/tcp.hpp"
#include "test_util.hpp"

namespace polyrdl::plugin {
namespace {

using namespace std::chrono_literals;
using polyrdl::testing::TempDir;
using service::Host;
using service::NodeOptions;

PluginDescriptor desc(std::string id, std::uint16_t port, std::vector<std::string> subs,
                      std::vector<std::string> perms, std::string exe = "external") {
  return {id, id + " plug-in", port, std::move(exe), std::move(subs), std::move(perms), 1};
}

std::filesystem::path write_meta(const TempDir& d, const std::string& file, const std::string& text) {
  const auto p = d / file;
  std::ofstream(p) << text;
  return p;
}

std::filesystem::path write_meta(const TempDir& d, const PluginDescriptor& x) {
  return write_meta(d, x.plugin_id + ".json", descriptor_json(x));
}

std::uint16_t free_port() {
  const int fd = sync::tcp_listen({"127.0.0.1", 0});
  const std::uint16_t p = sync::local_port(fd);
  sync::close_fd(fd);
  return p;
}

IntegrationCode code_of(const std::string& json) {
  try {
    const auto d = parse_descriptor(json);
    validate_schema(d, generate_schema(d));
  } catch (const IntegrationFailure& e) {
    return e.code();
  }
  return IntegrationCode::kOk;
}

TEST(DescriptorTest, ParsesExactKeys) {
  const auto d = parse_descriptor(R"({"plugin_id":"logging","name":"Audit","address":7101,"executable":"external",
      "subscriptions":["update","merge"],"permissions":[],"schema_version":1})");
  EXPECT_EQ(d.plugin_id, "logging");
  EXPECT_EQ(d.address, 7101);
  EXPECT_TRUE(d.external());
  EXPECT_TRUE(d.subscribed("merge"));
  EXPECT_FALSE(d.permitted("update"));
  EXPECT_EQ(parse_descriptor(descriptor_json(d)).subscriptions, d.subscriptions);
}

TEST(DescriptorTest, SchemaErrors) {
  const std::string base = R"("name":"n","address":7101,"executable":"external","subscriptions":[],"permissions":[],"schema_version":1)";
  EXPECT_EQ(code_of("not json"), IntegrationCode::kSchemaError);
  EXPECT_EQ(code_of("[1,2]"), IntegrationCode::kSchemaError);
  EXPECT_EQ(code_of("{" + base + "}"), IntegrationCode::kSchemaError);                                // no plugin_id
  EXPECT_EQ(code_of(R"({"plugin_id":"p","extra":1,)" + base + "}"), IntegrationCode::kSchemaError);  // extra key
  EXPECT_EQ(code_of(R"({"plugin_id":7,)" + base + "}"), IntegrationCode::kSchemaError);
  EXPECT_EQ(code_of(R"({"plugin_id":"p","name":"n","address":80,"executable":"external","subscriptions":[],"permissions":[],"schema_version":1})"),
            IntegrationCode::kSchemaError);
  EXPECT_EQ(code_of(R"({"plugin_id":"p","name":"n","address":7101,"executable":"external","subscriptions":"update","permissions":[],"schema_version":1})"),
            IntegrationCode::kSchemaError);
  EXPECT_EQ(code_of(R"({"plugin_id":"p",)" + base + "}"), IntegrationCode::kOk);
}

TEST(DescriptorTest, ClosedRegistry) {
  auto d = desc("p", 7101, {"frobnicate"}, {});
  EXPECT_EQ(code_of(descriptor_json(d)), IntegrationCode::kValidateError);
  d = desc("p", 7101, {"update"}, {"update", "update"});
  EXPECT_EQ(code_of(descriptor_json(d)), IntegrationCode::kValidateError);
}

TEST(DescriptorTest, GeneratedSchemaCoversEveryName) {
  const auto d = desc("p", 7101, {"update", "merge"}, {"access", "update"});
  const WireSchema s = generate_schema(d);
  ASSERT_EQ(s.entries.size(), 3u);
  EXPECT_TRUE(s.find("update")->subscribed);
  EXPECT_TRUE(s.find("update")->permitted);
  EXPECT_FALSE(s.find("access")->subscribed);
  EXPECT_EQ(s.find("update")->args_layout, "str object_id, u8 object_type, op");
  WireSchema bad = s;
  bad.entries[0].permitted = !bad.entries[0].permitted;
  EXPECT_THROW(validate_schema(d, bad), IntegrationFailure);
}

/// An in-process plug-in that records what it receives.
struct Probe {
  explicit Probe(const std::string& id, std::uint32_t version = 1)
      : ep({id, version, 0}, [this](const cdf::PluginEvent& e) {
          std::lock_guard lock(mu);
          got.push_back(e);
        }) {
    ep.start();
  }
  std::vector<cdf::PluginEvent> events() {
    std::lock_guard lock(mu);
    return got;
  }
  std::mutex mu;
  std::vector<cdf::PluginEvent> got;
  PluginEndpoint ep;
};

TEST(ManagerTest, HappyPathDeploys) {
  TempDir d;
  Host host(NodeOptions{"A"});
  Probe probe("logging");
  const auto meta = write_meta(d, desc("logging", probe.ep.port(), {"update", "merge"}, {}));
  const auto rep = host.integrate({"logging"}, {meta});
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep[0].code, IntegrationCode::kOk) << rep[0].message;
  EXPECT_TRUE(probe.ep.wait_connected(2s));
  EXPECT_EQ(host.plugins().deployed(), (std::vector<std::string>{"logging"}));
}

TEST(ManagerTest, ProceedsToNextPlugin) {
  TempDir d;
  Host host(NodeOptions{"A"}, 300ms);
  Probe good("good");
  Probe wrong_version("hello", 9);
  Probe second_good("good2");
  const auto bad = write_meta(d, "bad.json", "{ not json");
  const auto good_meta = write_meta(d, desc("good", good.ep.port(), {"update"}, {}));
  const auto frob = write_meta(d, desc("frob", free_port(), {"frobnicate"}, {}));
  const auto mismatch = write_meta(d, "other.json", descriptor_json(desc("someone-else", free_port(), {}, {})));
  const auto dup = write_meta(d, "dup.json", descriptor_json(desc("good", free_port(), {}, {})));
  const auto clash = write_meta(d, desc("clash", good.ep.port(), {}, {}));
  const auto nowhere = write_meta(d, desc("nowhere", free_port(), {}, {}, "./no-such-binary"));
  const auto hello = write_meta(d, desc("hello", wrong_version.ep.port(), {}, {}));
  const auto absent = write_meta(d, desc("absent", free_port(), {}, {}));
  const auto good2 = write_meta(d, desc("good2", second_good.ep.port(), {"sync"}, {}));

  const std::vector<std::string> ids = {"bad",  "good",    "frob",  "other", "good",  "clash",
                                        "nowhere", "hello", "absent", "missing", "good2"};
  const std::vector<std::filesystem::path> paths = {bad,     good_meta, frob,   mismatch,       dup, clash,
                                                    nowhere, hello,     absent, d / "missing.json", good2};
  const auto rep = host.integrate(ids, paths);
  ASSERT_EQ(rep.size(), ids.size());
  const std::vector<IntegrationCode> want = {
      IntegrationCode::kSchemaError,   IntegrationCode::kOk,          IntegrationCode::kValidateError,
      IntegrationCode::kIdMismatch,    IntegrationCode::kDuplicateId, IntegrationCode::kPortConflict,
      IntegrationCode::kLocateError,   IntegrationCode::kHelloMismatch, IntegrationCode::kDeployError,
      IntegrationCode::kMetadataMissing, IntegrationCode::kOk};
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(rep[i].code, want[i]) << ids[i] << ": " << to_string(rep[i].code) << " " << rep[i].message;
  }
  EXPECT_EQ(host.plugins().deployed(), (std::vector<std::string>{"good", "good2"}));
  EXPECT_FALSE(wrong_version.ep.connected());
}

TEST(ManagerTest, SpawnsExecutable) {
  TempDir d;
  NodeOptions no{"A", d / "data"};
  Host host(no);
  const std::uint16_t port = free_port();
  auto x = desc("logging", port, {"update", "merge"}, {}, POLYRDL_PLUGIN_BIN_DIR "/polyrdl-plugin-logging");
  const auto rep = host.integrate({"logging"}, {write_meta(d, x)});
  ASSERT_EQ(rep[0].code, IntegrationCode::kOk) << rep[0].message;
  auto session = host.plugins().session("logging");
  ASSERT_TRUE(session);
  EXPECT_GT(session->child(), 0);
  for (int i = 0; i < 5; ++i) host.node().update("c", ObjectType::kCounter, op::CounterAdd{1});
  const auto audit = d / "data" / "audit.jsonl";
  const auto end = std::chrono::steady_clock::now() + 5s;
  while (plugins::query_audit(audit).size() < 5 && std::chrono::steady_clock::now() < end) {
    std::this_thread::sleep_for(20ms);
  }
  EXPECT_EQ(plugins::query_audit(audit).size(), 5u);
  // A second plug-in wanting a port that is now taken.
  auto y = desc("undo", port, {}, {}, POLYRDL_PLUGIN_BIN_DIR "/polyrdl-plugin-undo");
  host.plugins().shutdown();
  const int squatter = sync::tcp_listen({"127.0.0.1", port});
  EXPECT_EQ(host.integrate({"undo"}, {write_meta(d, y)})[0].code, IntegrationCode::kPortConflict);
  sync::close_fd(squatter);
}

TEST(DispatchTest, SubscribedEventsOnlyInCommitOrder) {
  TempDir d;
  Host host(NodeOptions{"A"});
  Probe upd("upd");
  Probe syncer("syncer");
  host.integrate({"upd", "syncer"}, {write_meta(d, desc("upd", upd.ep.port(), {"update", "merge"}, {})),
                                     write_meta(d, desc("syncer", syncer.ep.port(), {"sync"}, {}))});
  const Update mine = host.node().update("c", ObjectType::kCounter, op::CounterAdd{2});
  Replica b("B");
  for (int i = 0; i < 3; ++i) b.local_update("s", ObjectType::kSet, op::SetAdd{to_bytes(std::to_string(i))});
  host.node().merge(sync::make_sync(b));
  host.node().sync();
  ASSERT_TRUE(upd.ep.wait_for_events(4, 3s));
  ASSERT_TRUE(syncer.ep.wait_for_events(1, 3s));
  std::this_thread::sleep_for(50ms);
  const auto ev = upd.events();
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_EQ(ev[0].core_function, "update");
  EXPECT_EQ(*ev[0].update, mine);
  const auto change = decode_change(ev[0].result_view);
  EXPECT_EQ(change.before, ValueView{AbsentView{}});
  EXPECT_EQ(change.after, ValueView{CounterValue{2}});
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(ev[i].core_function, "merge");
    EXPECT_EQ(ev[i].update->id, (UpdateId{"B", static_cast<std::uint64_t>(i)}));
    EXPECT_EQ(ev[i].event_seq, static_cast<std::uint64_t>(i + 1));
  }
  const auto s = syncer.events();
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].core_function, "sync");
  EXPECT_EQ(decode_sync_stats(s[0].result_view).updates, 4u);
  EXPECT_EQ(upd.ep.seq_gaps(), 0u);
}

TEST(CommandTest, PermissionsAndErrors) {
  TempDir d;
  Host host(NodeOptions{"A"});
  Probe p("undo");
  host.integrate({"undo"}, {write_meta(d, desc("undo", p.ep.port(), {}, {"update", "access"}))});
  ASSERT_TRUE(p.ep.wait_connected(2s));
  host.node().update("c", ObjectType::kCounter, op::CounterAdd{5});

  auto r = p.ep.call("update", encode_update_args({"c", ObjectType::kCounter, op::CounterAdd{-5}}));
  ASSERT_TRUE(r.event) << (r.error ? r.error->message : "");
  EXPECT_EQ(r.event->update->id, (UpdateId{"A", 2}));
  EXPECT_EQ(std::get<CounterValue>(host.node().access("c")).value, 0);

  const Digest before = host.node().digest();
  r = p.ep.call("merge", cdf::encode_sync({"Z", 0, {}, {}}));
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, kPermissionDenied);
  r = p.ep.call("frobnicate", {});
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, kUnknownFunction);
  r = p.ep.call("update", Bytes{1, 2, 3});
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, kBadArgs);
  r = p.ep.call("update", encode_update_args({"c", ObjectType::kSet, op::CounterAdd{1}}));
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, kCoreErrorBase + static_cast<std::uint16_t>(Errc::kTypeMismatch));
  EXPECT_EQ(host.node().digest(), before);

  r = p.ep.call("access", encode_access_args({"c", std::nullopt}));
  ASSERT_TRUE(r.event);
  EXPECT_EQ(cdf::decode_view(r.event->result_view), ValueView{CounterValue{0}});
  r = p.ep.call("access", encode_access_args({"", std::nullopt}));
  ASSERT_TRUE(r.event);
  const auto snap = decode_snapshot_reply(r.event->result_view);
  EXPECT_EQ(snap.state, host.node().encode_state());
  EXPECT_EQ(snap.clock, 2u);
}

TEST(CommandTest, HundredUpdatesApplyInOrder) {
  TempDir d;
  Host host(NodeOptions{"A"});
  Probe p("writer");
  host.integrate({"writer"}, {write_meta(d, desc("writer", p.ep.port(), {}, {"update"}))});
  ASSERT_TRUE(p.ep.wait_connected(2s));
  for (int i = 0; i < 100; ++i) {
    auto r = p.ep.call("update", encode_update_args({"m", ObjectType::kMap, op::MapPut{"k", std::int64_t{i}}}));
    ASSERT_TRUE(r.event);
  }
  host.node().inspect([](const Replica& r) {
    ASSERT_EQ(r.log().size(), 100u);
    for (std::size_t i = 0; i < 100; ++i) {
      EXPECT_EQ(std::get<std::int64_t>(std::get<op::MapPut>(r.log()[i].op).value), static_cast<std::int64_t>(i));
    }
  });
  const auto v = std::get<MapValue>(host.node().access("m"));
  EXPECT_EQ(std::get<std::int64_t>(std::get<RegisterValue>(*v.find("k")).value), 99);
}

TEST(CommandTest, NonIncreasingSeqRejected) {
  TempDir d;
  Host host(NodeOptions{"A"});
  const std::uint16_t port = free_port();
  // A hand-rolled plug-in that replays a cmd_seq.
  const int lfd = sync::tcp_listen({"127.0.0.1", port});
  std::thread t([&] {
    const int fd = ::accept(lfd, nullptr, nullptr);
    cdf::FrameBuffer buf;
    std::uint8_t b[4096];
    int frames = 0;
    auto next = [&]() -> cdf::Frame {
      for (;;) {
        if (auto f = buf.next()) return *f;
        const auto n = ::recv(fd, b, sizeof b, 0);
        if (n <= 0) return {};
        buf.feed(std::span<const std::uint8_t>(b, static_cast<std::size_t>(n)));
      }
    };
    next();  // host HELLO
    sync::send_all(fd, cdf::encode_frame(cdf::MsgType::kPluginHello, cdf::encode_hello({"raw", 1})));
    const Bytes args = encode_update_args({"c", ObjectType::kCounter, op::CounterAdd{1}});
    for (int i = 0; i < 2; ++i) {
      sync::send_all(fd, cdf::encode_frame(cdf::MsgType::kPluginCmd, cdf::encode_command({7, "update", args})));
    }
    while (frames < 2) {
      const cdf::Frame f = next();
      if (frames == 1) {
        EXPECT_EQ(f.type, cdf::MsgType::kPluginErr);
      }
      ++frames;
    }
    sync::close_fd(fd);
  });
  host.integrate({"raw"}, {write_meta(d, desc("raw", port, {}, {"update"}))});
  t.join();
  sync::close_fd(lfd);
  EXPECT_EQ(std::get<CounterValue>(host.node().access("c")).value, 1);
}

TEST(IsolationTest, StalledPluginNeverBlocksTheReplica) {
  TempDir d;
  Host host(NodeOptions{"A"}, 5s, 10);
  const std::uint16_t port = free_port();
  const int lfd = sync::tcp_listen({"127.0.0.1", port});
  int conn = -1;
  std::thread t([&] {
    conn = ::accept(lfd, nullptr, nullptr);
    int small = 4096;
    ::setsockopt(conn, SOL_SOCKET, SO_RCVBUF, &small, sizeof small);
    std::uint8_t b[64];
    ::recv(conn, b, 20, 0);  // the HELLO, then never read again
    sync::send_all(conn, cdf::encode_frame(cdf::MsgType::kPluginHello, cdf::encode_hello({"stall", 1})));
  });
  host.integrate({"stall"}, {write_meta(d, desc("stall", port, {"update"}, {}))});
  t.join();
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 20000; ++i) {
    host.node().update("s", ObjectType::kSet, op::SetAdd{Bytes(512, static_cast<std::uint8_t>(i))});
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, 20s);
  auto s = host.plugins().session("stall");
  EXPECT_GT(s->dropped(), 0u);
  EXPECT_LE(s->queued(), 10u);
  EXPECT_EQ(host.node().local_commits(), 20000u);
  sync::close_fd(conn);
  sync::close_fd(lfd);
}

TEST(IsolationTest, DeadPluginEventsAreCounted) {
  TempDir d;
  Host host(NodeOptions{"A"});
  auto probe = std::make_unique<Probe>("gone");
  host.integrate({"gone"}, {write_meta(d, desc("gone", probe->ep.port(), {"update"}, {}))});
  ASSERT_TRUE(probe->ep.wait_connected(2s));
  probe.reset();
  auto s = host.plugins().session("gone");
  const auto end = std::chrono::steady_clock::now() + 3s;
  while (s->alive() && std::chrono::steady_clock::now() < end) std::this_thread::sleep_for(10ms);
  EXPECT_FALSE(s->alive());
  for (int i = 0; i < 10; ++i) host.node().update("c", ObjectType::kCounter, op::CounterAdd{1});
  EXPECT_EQ(s->dropped(), 10u);
  EXPECT_EQ(std::get<CounterValue>(host.node().access("c")).value, 10);
}

}  // namespace
}  // namespace polyrdl::plugin
