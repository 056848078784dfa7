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

#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/service/node.hpp"
#include "polyrdl/sync/simnet.hpp"

namespace polyrdl::harness {

namespace {

using nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string replica_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "R" + std::to_string(i);
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario s;
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.replicas = get_or<std::size_t>(j, "replicas", s.replicas);
  s.ops = get_or<std::size_t>(j, "ops", s.ops);
  s.sync_every = get_or<std::uint64_t>(j, "sync_every", s.sync_every);
  if (j.contains("mix")) {
    const json& m = j.at("mix");
    s.mix.update = get_or<double>(m, "update", s.mix.update);
    s.mix.access = get_or<double>(m, "access", s.mix.access);
    s.mix.sync = get_or<double>(m, "sync", s.mix.sync);
    s.mix.reset = get_or<double>(m, "reset", s.mix.reset);
  }
  if (j.contains("objects")) {
    const json& o = j.at("objects");
    s.workload.counters = get_or(o, "counters", s.workload.counters);
    s.workload.sets = get_or(o, "sets", s.workload.sets);
    s.workload.maps = get_or(o, "maps", s.workload.maps);
  }
  s.workload.elements = get_or(j, "elements", s.workload.elements);
  s.workload.keys = get_or(j, "keys", s.workload.keys);
  if (j.contains("network")) {
    const json& n = j.at("network");
    s.min_delay = get_or<std::uint64_t>(n, "min_delay", s.min_delay);
    s.max_delay = get_or<std::uint64_t>(n, "max_delay", s.max_delay);
    s.fifo = get_or<bool>(n, "fifo", s.fifo);
  }
  for (const auto& p : j.value("partitions", json::array())) {
    s.partitions.push_back({p.at("start").get<std::uint64_t>(), p.at("end").get<std::uint64_t>(),
                            p.at("isolate").get<std::vector<std::string>>()});
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json parts = json::array();
  for (const auto& p : s.partitions) parts.push_back({{"start", p.start}, {"end", p.end}, {"isolate", p.isolate}});
  json j = {
      {"seed", s.seed},
      {"replicas", s.replicas},
      {"ops", s.ops},
      {"sync_every", s.sync_every},
      {"mix", {{"update", s.mix.update}, {"access", s.mix.access}, {"sync", s.mix.sync}, {"reset", s.mix.reset}}},
      {"objects", {{"counters", s.workload.counters}, {"sets", s.workload.sets}, {"maps", s.workload.maps}}},
      {"elements", s.workload.elements},
      {"keys", s.workload.keys},
      {"network", {{"min_delay", s.min_delay}, {"max_delay", s.max_delay}, {"fifo", s.fifo}}},
      {"partitions", parts},
  };
  return j.dump(2);
}

Scenario random_scenario(std::uint64_t seed) {
  Rng rng(seed ^ 0x5ce4a7105ce4a710ULL);
  Scenario s;
  s.seed = seed;
  s.replicas = 3;
  s.ops = 300 + rng() % 701;
  s.mix.reset = rng() % 4 == 0 ? 0.002 : 0.0;
  s.fifo = rng() % 2 == 0;
  const std::size_t windows = rng() % 3;
  for (std::size_t w = 0; w < windows; ++w) {
    const std::uint64_t start = rng() % s.ops;
    const std::uint64_t len = 20 + rng() % (s.ops / 2);
    s.partitions.push_back({start, start + len, {replica_name(rng() % s.replicas)}});
  }
  return s;
}

ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& trace_out) {
  ScenarioResult res;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < s.replicas; ++i) names.push_back(replica_name(i));

  sync::PartitionSchedule sched;
  for (const auto& p : s.partitions) sched.isolate(p.start, p.end, p.isolate, names);
  sync::SimOptions so;
  so.seed = s.seed;
  so.min_delay = s.min_delay;
  so.max_delay = s.max_delay;
  so.fifo = s.fifo;
  so.keep_trace = !trace_out.empty();
  sync::SimNetwork net(so, sched);

  std::vector<std::unique_ptr<service::Node>> nodes;
  for (const auto& n : names) {
    nodes.push_back(std::make_unique<service::Node>(service::NodeOptions{n}));
    auto* node = nodes.back().get();
    node->set_broadcast([&net, n](const Bytes& f) { net.broadcast(n, f); });
    net.attach(n, [node](const std::string&, const Bytes& f) {
      std::span<const std::uint8_t> in(f);
      node->on_frame(cdf::decode_frame(in));
    });
  }

  Rng rng(s.seed);
  std::vector<Update> issued;
  std::vector<Bytes> snapshots;  // earlier states a Reset may go back to
  const double total = s.mix.update + s.mix.access + s.mix.sync + s.mix.reset;
  std::uniform_real_distribution<double> coin(0.0, total > 0 ? total : 1.0);

  for (std::size_t step = 0; step < s.ops; ++step) {
    service::Node& node = *nodes[rng() % nodes.size()];
    const double c = coin(rng);
    if (c < s.mix.update) {
      LocalOp op;
      node.inspect([&](const Replica& r) { op = next_local_op(rng, r, s.workload); });
      issued.push_back(node.update(op.object_id, op.type, std::move(op.op)));
      if (rng() % 50 == 0) snapshots.push_back(node.encode_state());
    } else if (c < s.mix.update + s.mix.access) {
      node.access(s.workload.counters.empty() ? "c" : s.workload.counters.front());
    } else if (c < s.mix.update + s.mix.access + s.mix.sync) {
      node.sync();
    } else {
      issued.push_back(node.reset(snapshots.empty() ? Bytes{0, 0, 0, 0} : snapshots[rng() % snapshots.size()]));
    }
    if (s.sync_every > 0 && (step + 1) % s.sync_every == 0) {
      for (auto& n : nodes) n->sync();
    }
    net.step();
  }

  // Quiescence: let partitions heal and the network drain, then one full
  // round so every pair has exchanged logs after the heal.
  while (net.now() < sched.healed_at()) net.step();
  net.run_until_idle();
  for (auto& n : nodes) n->sync();
  net.run_until_idle();
  res.steps = net.now();

  const Digest expect = oracle_digest(issued);
  res.oracle_digest = to_hex(expect);
  res.updates = issued.size();
  res.converged = true;
  res.matches_oracle = true;
  for (auto& n : nodes) {
    const Digest d = n->digest();
    res.digests.push_back(to_hex(d));
    res.reports.push_back(n->merge_totals());
    if (d != nodes.front()->digest()) res.converged = false;
    if (d != expect) {
      res.matches_oracle = false;
      if (res.failure.empty()) res.failure = "replica " + n->id() + " digest " + to_hex(d) + " != oracle " + to_hex(expect);
    }
  }
  if (!res.converged && res.failure.empty()) res.failure = "replicas disagree";
  res.trace_hash = net.trace_hash();
  if (!res.ok() && !trace_out.empty()) {
    std::ofstream out(trace_out);
    net.write_trace(out);
  }
  return res;
}

}  // namespace polyrdl::harness
