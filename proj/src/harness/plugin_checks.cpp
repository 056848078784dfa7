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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/harness/scenario.hpp"
#include "polyrdl/harness/workload.hpp"
#include "polyrdl/plugin/descriptor.hpp"
#include "polyrdl/plugin/endpoint.hpp"
#include "polyrdl/plugins/logging.hpp"
#include "polyrdl/plugins/rollback.hpp"
#include "polyrdl/plugins/undo.hpp"
#include "polyrdl/service/host.hpp"
#include "polyrdl/sync/simnet.hpp"
#include "polyrdl/sync/tcp.hpp"

namespace polyrdl::harness {

namespace {

using namespace std::chrono_literals;
namespace fs = std::filesystem;
using service::Host;
using service::Node;

service::NodeOptions memory_only(const std::string& id) {
  service::NodeOptions o;
  o.id = id;
  return o;
}

class Scratch {
 public:
  Scratch() {
    static std::atomic<int> n{0};
    path_ = fs::temp_directory_path() /
            ("polyrdl-check-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

template <class Pred>
bool eventually(Pred p, std::chrono::milliseconds limit = 10s) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (p()) return true;
    std::this_thread::sleep_for(5ms);
  }
  return p();
}

plugin::IntegrationResult attach(Host& host, const fs::path& dir, const std::string& id, std::uint16_t port,
                                 std::vector<std::string> subs, std::vector<std::string> perms) {
  plugin::PluginDescriptor d{id, id, port, "external", std::move(subs), std::move(perms), 1};
  const fs::path meta = dir / (id + ".json");
  std::ofstream(meta) << plugin::descriptor_json(d);
  return host.integrate({id}, {meta}).at(0);
}

/// Hosts on one simulated network.
class SimFleet {
 public:
  SimFleet(std::size_t n, std::uint64_t seed, sync::PartitionSchedule sched = {})
      : net_(sync::SimOptions{seed, 1, 6, false, false}, std::move(sched)) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string name = replica_name(i);
      hosts_.push_back(std::make_unique<Host>(memory_only(name)));
      Node* node = &hosts_.back()->node();
      node->set_broadcast([this, name](const Bytes& f) { net_.broadcast(name, f); });
      net_.attach(name, [node](const std::string&, const Bytes& f) {
        std::span<const std::uint8_t> in(f);
        node->on_frame(cdf::decode_frame(in));
      });
    }
  }

  Host& host(std::size_t i) { return *hosts_[i]; }
  Node& node(std::size_t i) { return hosts_[i]->node(); }
  std::size_t size() const { return hosts_.size(); }
  sync::SimNetwork& net() { return net_; }

  void settle() {
    net_.run_until_idle();
    for (auto& h : hosts_) h->node().sync();
    net_.run_until_idle();
  }

  bool converged() {
    for (auto& h : hosts_) {
      if (h->node().digest() != hosts_.front()->node().digest()) return false;
    }
    return true;
  }

 private:
  sync::SimNetwork net_;
  std::vector<std::unique_ptr<Host>> hosts_;
};

std::int64_t counter_at(Node& n, const std::string& obj) {
  const ValueView v = n.access(obj, ObjectType::kCounter);
  const auto* c = std::get_if<CounterValue>(&v);
  return c ? c->value : INT64_MIN;
}

ValueView oracle_view(const std::vector<Update>& ups, const std::string& obj) {
  const auto store = cdf::decode_state(oracle_fold(ups));
  auto it = store.find(obj);
  if (it == store.end()) return AbsentView{};
  return resolve(it->second);
}

std::string view_hex(const ValueView& v) { return cdf::hex_encode(cdf::encode_view(v)); }

// ---------------------------------------------------------------- undo

struct Step {
  std::size_t replica;
  std::string object_id;
  ObjectType type;
  // Built against the issuing replica, so removes can name what it sees.
  std::function<OpPayload(const Replica&)> op;
};

struct UndoCase {
  std::string name;
  std::vector<Step> prep;
  Step target;
};

template <class Op>
std::function<OpPayload(const Replica&)> fixed(Op o) {
  return [o](const Replica&) { return OpPayload{o}; };
}

std::function<OpPayload(const Replica&)> set_remove(std::string obj, std::string e) {
  return [obj, e](const Replica& r) {
    return OpPayload{op::SetRemove{to_bytes(e), observed_tags(r, obj, to_bytes(e))}};
  };
}

std::function<OpPayload(const Replica&)> map_set_remove(std::string obj, std::string key, std::string e) {
  return [obj, key, e](const Replica& r) {
    return OpPayload{op::MapSetRemove{key, to_bytes(e), observed_tags(r, obj, key, to_bytes(e))}};
  };
}

Update run_step(SimFleet& fleet, const Step& s) {
  OpPayload op;
  fleet.node(s.replica).inspect([&](const Replica& r) { op = s.op(r); });
  return fleet.node(s.replica).update(s.object_id, s.type, std::move(op));
}

std::vector<UndoCase> undo_cases() {
  const auto C = ObjectType::kCounter;
  const auto S = ObjectType::kSet;
  const auto M = ObjectType::kMap;
  auto x = to_bytes("x");
  auto y = to_bytes("y");
  return {
      {"CounterAdd", {{0, "c", C, fixed(op::CounterAdd{5})}}, {0, "c", C, fixed(op::CounterAdd{3})}},
      {"CounterAdd(remote)", {{1, "c", C, fixed(op::CounterAdd{2})}}, {1, "c", C, fixed(op::CounterAdd{-7})}},
      {"SetAdd(shared element)",
       {{1, "s", S, fixed(op::SetAdd{x})}, {0, "s", S, fixed(op::SetAdd{y})}},
       {0, "s", S, fixed(op::SetAdd{x})}},
      {"SetAdd(sole element)", {{0, "s", S, fixed(op::SetAdd{y})}}, {0, "s", S, fixed(op::SetAdd{x})}},
      {"SetRemove",
       {{0, "s", S, fixed(op::SetAdd{x})}, {1, "s", S, fixed(op::SetAdd{x})}, {1, "s", S, fixed(op::SetAdd{y})}},
       {0, "s", S, set_remove("s", "x")}},
      {"MapPut(prior value)", {{0, "m", M, fixed(op::MapPut{"k", std::int64_t{1}})}},
       {1, "m", M, fixed(op::MapPut{"k", std::int64_t{2}})}},
      {"MapPut(no prior)", {{0, "m", M, fixed(op::MapPut{"j", true})}},
       {0, "m", M, fixed(op::MapPut{"k", std::string("v")})}},
      {"MapPut(over counter)", {{0, "m", M, fixed(op::MapCounterAdd{"k", 4})}},
       {0, "m", M, fixed(op::MapPut{"k", 2.5})}},
      {"MapPut(over set)", {{1, "m", M, fixed(op::MapSetAdd{"k", x})}, {0, "m", M, fixed(op::MapSetAdd{"k", y})}},
       {0, "m", M, fixed(op::MapPut{"k", std::int64_t{9}})}},
      {"MapRemoveKey(register)", {{0, "m", M, fixed(op::MapPut{"k", std::int64_t{1}})}, {0, "m", M, fixed(op::MapPut{"j", false})}},
       {1, "m", M, fixed(op::MapRemoveKey{"k"})}},
      {"MapRemoveKey(counter)", {{0, "m", M, fixed(op::MapPut{"k", std::int64_t{1}})}, {1, "m", M, fixed(op::MapCounterAdd{"j", 3})}},
       {0, "m", M, fixed(op::MapRemoveKey{"j"})}},
      {"MapRemoveKey(set)", {{0, "m", M, fixed(op::MapSetAdd{"j", x})}, {1, "m", M, fixed(op::MapPut{"k", true})}},
       {0, "m", M, fixed(op::MapRemoveKey{"j"})}},
      {"MapCounterAdd", {{0, "m", M, fixed(op::MapCounterAdd{"k", 1})}}, {1, "m", M, fixed(op::MapCounterAdd{"k", 6})}},
      {"MapSetAdd(shared element)", {{1, "m", M, fixed(op::MapSetAdd{"k", x})}}, {0, "m", M, fixed(op::MapSetAdd{"k", x})}},
      {"MapSetRemove",
       {{0, "m", M, fixed(op::MapSetAdd{"k", x})}, {1, "m", M, fixed(op::MapSetAdd{"k", y})}},
       {0, "m", M, map_set_remove("m", "k", "x")}},
  };
}

// Two replicas; the undo plug-in sits on the first.
struct UndoRig {
  UndoRig() : fleet(2, 11), undo({"undo", 1, 0}) {
    undo.start();
    const auto r = attach(fleet.host(0), dir.path(), "undo", undo.endpoint().port(), {"update", "merge"}, {"update"});
    if (r.code != plugin::IntegrationCode::kOk) throw Error(Errc::kInvalidArgument, "undo plug-in: " + r.message);
    if (!undo.endpoint().wait_connected(5s)) throw Error(Errc::kIo, "undo plug-in never connected");
  }
  ~UndoRig() { undo.stop(); }

  Scratch dir;
  SimFleet fleet;
  plugins::UndoPlugin undo;
};

CheckResult run_undo_case(const UndoCase& c) {
  CheckResult res{"undo " + c.name, false, {}};
  UndoRig rig;
  std::vector<Update> history;
  for (const auto& s : c.prep) history.push_back(run_step(rig.fleet, s));
  rig.fleet.settle();
  const Update target = run_step(rig.fleet, c.target);
  history.push_back(target);
  rig.fleet.settle();
  if (!eventually([&] { return rig.undo.knows(target.id); })) {
    res.detail = "target never reached the shadow log";
    return res;
  }
  const plugins::UndoResult u = rig.undo.undo(target.id);
  if (u.code != plugins::UndoCode::kOk) {
    res.detail = std::string(to_string(u.code)) + ": " + u.message;
    return res;
  }
  history.insert(history.end(), u.issued.begin(), u.issued.end());
  rig.fleet.settle();

  std::vector<Update> without;
  for (const auto& h : history) {
    if (h.id != target.id && std::find_if(u.issued.begin(), u.issued.end(), [&](const Update& i) { return i.id == h.id; }) == u.issued.end()) {
      without.push_back(h);
    }
  }
  const Digest expect = oracle_digest(history);
  const std::string want_view = view_hex(oracle_view(without, c.target.object_id));
  for (std::size_t i = 0; i < rig.fleet.size(); ++i) {
    Node& n = rig.fleet.node(i);
    if (n.digest() != expect) {
      res.detail = n.id() + " differs from the oracle of history plus compensations";
      return res;
    }
    const std::string got = view_hex(n.access(c.target.object_id));
    if (got != want_view) {
      res.detail = n.id() + " reads " + got + ", oracle without the target reads " + want_view;
      return res;
    }
  }
  res.ok = true;
  res.detail = std::to_string(u.issued.size()) + " compensating update(s)";
  return res;
}

// ---------------------------------------------------------------- rollback

struct RollbackRig {
  explicit RollbackRig(SimFleet& f) : rollback({"rollback", 1, 0}, dir.path()) {
    rollback.start();
    const auto r = attach(f.host(0), dir.path(), "rollback", rollback.endpoint().port(), {},
                          {"access", "update", "sync"});
    if (r.code != plugin::IntegrationCode::kOk) throw Error(Errc::kInvalidArgument, "rollback plug-in: " + r.message);
    if (!rollback.endpoint().wait_connected(5s)) throw Error(Errc::kIo, "rollback plug-in never connected");
  }
  ~RollbackRig() { rollback.stop(); }

  Scratch dir;
  plugins::RollbackPlugin rollback;
};

std::string reads(const std::vector<Node*>& nodes) {
  std::ostringstream out;
  for (Node* n : nodes) out << n->id() << "=" << counter_at(*n, "c") << " ";
  return out.str();
}

bool all_read(const std::vector<Node*>& nodes, std::int64_t v) {
  for (Node* n : nodes) {
    if (counter_at(*n, "c") != v) return false;
  }
  for (Node* n : nodes) {
    if (n->digest() != nodes.front()->digest()) return false;
  }
  return true;
}

}  // namespace

CheckResult check_integration_batch() {
  CheckResult res{"integration batch", true, ""};
  Scratch d;
  Host host(memory_only("A"), 300ms);
  auto endpoint = [](const std::string& id, std::uint32_t version) {
    auto ep = std::make_unique<plugin::PluginEndpoint>(plugin::EndpointOptions{id, version, 0},
                                                       [](const cdf::PluginEvent&) {});
    ep->start();
    return ep;
  };
  auto good = endpoint("good", 1);
  auto good2 = endpoint("good2", 1);
  auto wrong_version = endpoint("hello", 9);
  auto unused_port = [] {
    const int fd = sync::tcp_listen({"127.0.0.1", 0});
    const std::uint16_t p = sync::local_port(fd);
    sync::close_fd(fd);
    return p;
  };
  auto meta = [&](const std::string& file, const std::string& text) {
    const fs::path p = d.path() / file;
    std::ofstream(p) << text;
    return p;
  };
  auto desc = [](const std::string& id, std::uint16_t port, std::vector<std::string> subs,
                 std::string exe = "external") {
    return plugin::descriptor_json({id, id, port, std::move(exe), std::move(subs), {}, 1});
  };

  struct Entry {
    std::string id;
    fs::path path;
    plugin::IntegrationCode want;
  };
  using C = plugin::IntegrationCode;
  const std::vector<Entry> batch = {
      {"bad", meta("bad.json", "{ not json"), C::kSchemaError},
      {"good", meta("good.json", desc("good", good->port(), {"update"})), C::kOk},
      {"frob", meta("frob.json", desc("frob", unused_port(), {"frobnicate"})), C::kValidateError},
      {"other", meta("other.json", desc("someone-else", unused_port(), {})), C::kIdMismatch},
      {"good", meta("dup.json", desc("good", unused_port(), {})), C::kDuplicateId},
      {"clash", meta("clash.json", desc("clash", good->port(), {})), C::kPortConflict},
      {"nowhere", meta("nowhere.json", desc("nowhere", unused_port(), {}, "./no-such-binary")), C::kLocateError},
      {"hello", meta("hello.json", desc("hello", wrong_version->port(), {})), C::kHelloMismatch},
      {"absent", meta("absent.json", desc("absent", unused_port(), {})), C::kDeployError},
      {"missing", d.path() / "missing.json", C::kMetadataMissing},
      {"good2", meta("good2.json", desc("good2", good2->port(), {"sync"})), C::kOk},
  };
  std::vector<std::string> ids;
  std::vector<fs::path> paths;
  for (const auto& e : batch) {
    ids.push_back(e.id);
    paths.push_back(e.path);
  }
  const auto rep = host.integrate(ids, paths);
  std::ostringstream why;
  if (rep.size() != batch.size()) {
    res.ok = false;
    why << rep.size() << " results for " << batch.size() << " entries";
  } else {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (rep[i].code != batch[i].want) {
        res.ok = false;
        why << batch[i].id << ": got " << plugin::to_string(rep[i].code) << " want "
            << plugin::to_string(batch[i].want) << "; ";
      }
    }
  }
  const auto deployed = host.plugins().deployed();
  if (deployed != std::vector<std::string>{"good", "good2"}) {
    res.ok = false;
    why << "deployed set wrong (" << deployed.size() << ")";
  }
  res.detail = res.ok ? std::to_string(batch.size()) + " entries, 2 deployed" : why.str();
  return res;
}

CheckResult check_logging_completeness(std::uint64_t seed, std::size_t ops) {
  CheckResult res{"logging completeness", false, {}};
  Scratch dir;
  SimFleet fleet(3, seed);
  const fs::path log = dir.path() / "audit.jsonl";
  plugins::LoggingPlugin logging({"logging", 1, 0}, log);
  logging.start();
  const auto r = attach(fleet.host(0), dir.path(), "logging", logging.endpoint().port(), {"update", "merge"}, {});
  if (r.code != plugin::IntegrationCode::kOk) {
    res.detail = "integration: " + r.message;
    return res;
  }

  Rng rng(seed);
  WorkloadSpec spec;
  for (std::size_t i = 0; i < ops; ++i) {
    Node& n = fleet.node(rng() % fleet.size());
    LocalOp op;
    n.inspect([&](const Replica& rep) { op = next_local_op(rng, rep, spec); });
    n.update(op.object_id, op.type, std::move(op.op));
    if (rng() % 10 == 0) n.sync();
    fleet.net().step();
  }
  fleet.settle();

  Node& host = fleet.node(0);
  const std::uint64_t applied = host.local_commits() + host.merge_totals().applied;
  eventually([&] { return logging.records() >= applied; });
  std::this_thread::sleep_for(20ms);  // anything beyond the expected count
  auto session = fleet.host(0).plugins().session("logging");
  const auto audit = plugins::query_audit(log);

  std::multiset<std::string> logged;
  for (const auto& a : audit) logged.insert(a.update);
  std::multiset<std::string> committed;
  host.inspect([&](const Replica& rep) {
    for (const auto& u : rep.log()) committed.insert(cdf::hex_encode(cdf::encode_update(u)));
  });
  logging.stop();

  std::ostringstream d;
  d << audit.size() << " records, " << applied << " applied (" << host.local_commits() << " local, "
    << host.merge_totals().applied << " merged), dropped " << (session ? session->dropped() : 0);
  res.detail = d.str();
  res.ok = audit.size() == applied && logging.records() == applied && logged == committed &&
           session && session->dropped() == 0 && fleet.converged();
  if (!res.ok && logged != committed) res.detail += "; audit multiset differs from the commit log";
  return res;
}

std::vector<CheckResult> check_undo_kinds() {
  std::vector<CheckResult> out;
  for (const auto& c : undo_cases()) {
    try {
      out.push_back(run_undo_case(c));
    } catch (const std::exception& e) {
      out.push_back({"undo " + c.name, false, e.what()});
    }
  }
  return out;
}

CheckResult check_undo_refusals() {
  CheckResult res{"undo refusals", false, {}};
  UndoRig rig;
  Node& a = rig.fleet.node(0);
  const Update t = a.update("c", ObjectType::kCounter, op::CounterAdd{4});
  if (!eventually([&] { return rig.undo.knows(t.id); })) {
    res.detail = "target never reached the shadow log";
    return res;
  }
  const auto unknown = rig.undo.undo({"Z", 99});
  const auto first = rig.undo.undo(t.id);
  const auto second = rig.undo.undo(t.id);
  const Update reset = a.reset(a.encode_state());
  eventually([&] { return rig.undo.knows(reset.id); });
  const auto unsupported = rig.undo.undo(reset.id);
  std::ostringstream d;
  d << "unknown=" << to_string(unknown.code) << " first=" << to_string(first.code)
    << " repeat=" << to_string(second.code) << " reset=" << to_string(unsupported.code);
  res.detail = d.str();
  res.ok = unknown.code == plugins::UndoCode::kUnknownUpdate && first.code == plugins::UndoCode::kOk &&
           second.code == plugins::UndoCode::kIdempotentNoop && second.issued.empty() &&
           unsupported.code == plugins::UndoCode::kUnsupported && counter_at(a, "c") == 0;
  return res;
}

CheckResult check_rollback_sim() {
  CheckResult res{"rollback (simulated network)", false, {}};
  SimFleet fleet(3, 21);
  RollbackRig rig(fleet);
  std::vector<Node*> nodes = {&fleet.node(0), &fleet.node(1), &fleet.node(2)};
  for (int i = 0; i < 10; ++i) nodes[i % 3]->update("c", ObjectType::kCounter, op::CounterAdd{1});
  fleet.settle();
  if (!all_read(nodes, 10)) {
    res.detail = "before checkpoint: " + reads(nodes);
    return res;
  }
  if (auto r = rig.rollback.checkpoint("ten"); r.code != plugins::RollbackCode::kOk) {
    res.detail = "checkpoint: " + r.message;
    return res;
  }
  for (int i = 0; i < 3; ++i) nodes[(i + 1) % 3]->update("c", ObjectType::kCounter, op::CounterAdd{1});
  fleet.settle();
  if (!all_read(nodes, 13)) {
    res.detail = "after +3: " + reads(nodes);
    return res;
  }
  if (auto r = rig.rollback.restore("ten"); r.code != plugins::RollbackCode::kOk) {
    res.detail = "restore: " + r.message;
    return res;
  }
  fleet.settle();
  if (!all_read(nodes, 10)) {
    res.detail = "after restore: " + reads(nodes);
    return res;
  }
  nodes[1]->update("c", ObjectType::kCounter, op::CounterAdd{1});
  fleet.settle();
  res.ok = all_read(nodes, 11);
  res.detail = "final: " + reads(nodes);
  return res;
}

CheckResult check_rollback_straggler_sim() {
  CheckResult res{"rollback with straggler (simulated network)", false, {}};
  constexpr std::uint64_t kCut = 100;
  constexpr std::uint64_t kHeal = 200;
  sync::PartitionSchedule sched;
  sched.isolate(kCut, kHeal, {"C"}, {"A", "B", "C"});
  SimFleet fleet(3, 22, sched);
  RollbackRig rig(fleet);
  std::vector<Node*> nodes = {&fleet.node(0), &fleet.node(1), &fleet.node(2)};
  for (int i = 0; i < 10; ++i) nodes[i % 3]->update("c", ObjectType::kCounter, op::CounterAdd{1});
  fleet.settle();
  if (!all_read(nodes, 10) || fleet.net().now() >= kCut) {
    res.detail = "before checkpoint: " + reads(nodes);
    return res;
  }
  while (fleet.net().now() < kCut) fleet.net().step();
  if (auto r = rig.rollback.checkpoint("ten"); r.code != plugins::RollbackCode::kOk) {
    res.detail = "checkpoint: " + r.message;
    return res;
  }
  // C writes while cut off; its sync is held until the heal, by which time
  // the restore has moved everyone else to the next epoch.
  const Update straggler = nodes[2]->update("c", ObjectType::kCounter, op::CounterAdd{100});
  nodes[2]->sync();
  if (auto r = rig.rollback.restore("ten"); r.code != plugins::RollbackCode::kOk) {
    res.detail = "restore: " + r.message;
    return res;
  }
  fleet.settle();
  const std::uint64_t stale_a = nodes[0]->merge_totals().stale;
  const std::uint64_t stale_b = nodes[1]->merge_totals().stale;
  const bool restored = all_read(nodes, 10) && stale_a > 0 && stale_b > 0 && fleet.net().now() >= kHeal;
  const std::string after_restore = reads(nodes);
  nodes[2]->update("c", ObjectType::kCounter, op::CounterAdd{1});
  fleet.settle();
  res.ok = restored && all_read(nodes, 11);
  res.detail = "straggler C:" + std::to_string(straggler.id.seq) + " stale at A " + std::to_string(stale_a) +
               "x, B " + std::to_string(stale_b) + "x; after restore " + after_restore + "; final " + reads(nodes);
  return res;
}

CheckResult check_rollback_tcp() {
  CheckResult res{"rollback (TCP)", false, {}};
  struct Peer {
    Peer(const std::string& id, std::vector<sync::HostPort> peers)
        : host(memory_only(id)),
          transport(sync::TcpOptions{{"127.0.0.1", 0}, std::move(peers), 20ms, 200ms},
                    [this](const cdf::Frame& f) { host.node().on_frame(f); },
                    [this] { return host.node().sync_frame(); }) {
      host.node().set_broadcast([this](const Bytes& f) { transport.broadcast(f); });
      transport.start();
    }
    ~Peer() { transport.stop(); }
    Host host;
    sync::TcpTransport transport;
  };
  auto a = std::make_unique<Peer>("A", std::vector<sync::HostPort>{});
  auto b = std::make_unique<Peer>("B", std::vector<sync::HostPort>{{"127.0.0.1", a->transport.port()}});
  auto c = std::make_unique<Peer>("C", std::vector<sync::HostPort>{{"127.0.0.1", a->transport.port()},
                                                                   {"127.0.0.1", b->transport.port()}});
  std::vector<Node*> nodes = {&a->host.node(), &b->host.node(), &c->host.node()};
  if (!eventually([&] { return a->transport.connections() == 2 && b->transport.connections() == 2; })) {
    res.detail = "mesh never formed";
    return res;
  }
  Scratch dir;
  plugins::RollbackPlugin rollback({"rollback", 1, 0}, dir.path());
  rollback.start();
  const auto r = attach(a->host, dir.path(), "rollback", rollback.endpoint().port(), {}, {"access", "update", "sync"});
  if (r.code != plugin::IntegrationCode::kOk) {
    res.detail = "integration: " + r.message;
    return res;
  }
  auto step = [&](const char* what, std::int64_t want) {
    if (eventually([&] { return all_read(nodes, want); })) return true;
    res.detail = std::string(what) + ": " + reads(nodes);
    return false;
  };
  for (int i = 0; i < 10; ++i) {
    nodes[i % 3]->update("c", ObjectType::kCounter, op::CounterAdd{1});
    nodes[i % 3]->sync();
  }
  if (!step("before checkpoint", 10)) return res;
  if (auto x = rollback.checkpoint("ten"); x.code != plugins::RollbackCode::kOk) {
    res.detail = "checkpoint: " + x.message;
    return res;
  }
  for (int i = 0; i < 3; ++i) {
    nodes[(i + 1) % 3]->update("c", ObjectType::kCounter, op::CounterAdd{1});
    nodes[(i + 1) % 3]->sync();
  }
  if (!step("after +3", 13)) return res;
  if (auto x = rollback.restore("ten"); x.code != plugins::RollbackCode::kOk) {
    res.detail = "restore: " + x.message;
    return res;
  }
  if (!step("after restore", 10)) return res;
  nodes[1]->update("c", ObjectType::kCounter, op::CounterAdd{1});
  nodes[1]->sync();
  if (!step("after +1", 11)) return res;
  rollback.stop();
  res.ok = true;
  res.detail = "final: " + reads(nodes);
  return res;
}

}  // namespace polyrdl::harness
