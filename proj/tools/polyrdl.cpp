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

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/harness/bench.hpp"
#include "polyrdl/harness/scenario.hpp"
#include "polyrdl/harness/vectors.hpp"
#include "polyrdl/harness/workload.hpp"
#include "polyrdl/service/host.hpp"
#include "polyrdl/sync/tcp.hpp"

namespace {

using namespace polyrdl;
namespace fs = std::filesystem;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ------------------------------------------------------------------ bench

int cmd_bench(const std::string& types, const std::string& ops, const std::string& out, std::size_t reps,
              std::uint64_t seed, bool in_process) {
  harness::BenchConfig cfg;
  cfg.types.clear();
  for (const auto& t : split(types, ',')) cfg.types.push_back(harness::parse_data_type(t));
  cfg.ops.clear();
  for (const auto& n : split(ops, ',')) cfg.ops.push_back(std::stoul(n));
  cfg.repetitions = reps;
  cfg.seed = seed;
  cfg.isolate = !in_process;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = harness::run_bench(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  harness::print_bench_summary(std::cout, rows);
  std::cout << "elapsed " << secs << " s\n";
  if (!out.empty()) {
    std::ofstream f(out);
    harness::write_bench_csv(f, rows);
    if (!f) throw std::runtime_error("cannot write " + out);
    std::cout << "wrote " << out << "\n";
  } else {
    harness::write_bench_csv(std::cout, rows);
  }
  return 0;
}

// -------------------------------------------------------------------- sim

int cmd_sim(const std::string& scenario_file, std::optional<std::uint64_t> seed, std::size_t count,
            const std::string& trace, bool dump) {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < count; ++i) {
    harness::Scenario s;
    if (!scenario_file.empty()) {
      s = harness::scenario_from_json(read_file(scenario_file));
      if (seed) s.seed = *seed + i;
    } else {
      s = harness::random_scenario(seed.value_or(1) + i);
    }
    if (dump) std::cout << harness::scenario_to_json(s) << "\n";
    const harness::ScenarioResult r = harness::run_scenario(s, trace.empty() ? fs::path{} : fs::path(trace));
    sync::MergeReport total;
    for (const auto& rep : r.reports) total += rep;
    std::cout << (r.ok() ? "OK" : "DIVERGED") << " seed=" << s.seed << " replicas=" << s.replicas
              << " ops=" << s.ops << " updates=" << r.updates << " steps=" << r.steps
              << " applied=" << total.applied << " duplicates=" << total.duplicates << " stale=" << total.stale
              << " digest=" << r.oracle_digest << " trace=" << r.trace_hash << "\n";
    if (!r.ok()) {
      ++failures;
      std::cout << "  " << r.failure << "\n";
      for (std::size_t k = 0; k < r.digests.size(); ++k) {
        std::cout << "  " << harness::replica_name(k) << " " << r.digests[k] << "\n";
      }
      if (!trace.empty()) std::cout << "  trace written to " << trace << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- replica

/// One line of the replica's stdin control protocol. Returns false to stop.
bool control(service::Node& node, const std::string& line) {
  std::istringstream in(line);
  std::string cmd, obj;
  in >> cmd >> obj;
  auto rest = [&] {
    std::string r;
    std::getline(in >> std::ws, r);
    return r;
  };
  if (cmd == "quit") return false;
  if (cmd == "add") {
    std::int64_t d = 0;
    in >> d;
    node.update(obj, ObjectType::kCounter, op::CounterAdd{d});
  } else if (cmd == "sadd") {
    node.update(obj, ObjectType::kSet, op::SetAdd{to_bytes(rest())});
  } else if (cmd == "srem") {
    const Bytes e = to_bytes(rest());
    std::vector<UpdateId> tags;
    node.inspect([&](const Replica& r) { tags = harness::observed_tags(r, obj, e); });
    node.update(obj, ObjectType::kSet, op::SetRemove{e, tags});
  } else if (cmd == "put") {
    std::string key;
    in >> key;
    const std::string v = rest();
    Scalar value = v;
    try {
      std::size_t used = 0;
      const long long n = std::stoll(v, &used);
      if (used == v.size()) value = static_cast<std::int64_t>(n);
    } catch (const std::exception&) {
    }
    node.update(obj, ObjectType::kMap, op::MapPut{key, value});
  } else if (cmd == "del") {
    std::string key;
    in >> key;
    node.update(obj, ObjectType::kMap, op::MapRemoveKey{key});
  } else if (cmd == "get") {
    std::cout << describe(node.access(obj)) << std::endl;
    return true;
  } else if (cmd == "sync") {
    node.sync();
  } else if (cmd == "digest") {
    std::cout << to_hex(node.digest()) << std::endl;
    return true;
  } else if (cmd == "state") {
    std::cout << cdf::hex_encode(node.encode_state()) << std::endl;
    return true;
  } else {
    std::cout << "error unknown command " << cmd << std::endl;
    return true;
  }
  std::cout << "ok" << std::endl;
  return true;
}

int cmd_replica(const std::string& id, const std::string& listen, const std::string& peers,
                const std::string& data_dir, const std::vector<std::string>& plugins, std::uint64_t sync_ms,
                std::uint64_t snapshot_every) {
  service::NodeOptions no;
  no.id = id;
  if (!data_dir.empty()) no.data_dir = fs::path(data_dir);
  no.snapshot_every = snapshot_every;
  service::Host host(no);
  service::Node& node = host.node();
  if (const auto& rec = node.recovery()) {
    std::cout << "recovered snapshot=" << (rec->snapshot ? std::to_string(*rec->snapshot) : "none")
              << " replayed=" << rec->replayed << " torn_bytes=" << rec->torn_bytes << std::endl;
  }

  sync::TcpOptions to;
  to.listen = sync::parse_host_port(listen);
  for (const auto& p : split(peers, ',')) to.peers.push_back(sync::parse_host_port(p));
  sync::TcpTransport transport(
      to, [&](const cdf::Frame& f) { node.on_frame(f); }, [&] { return node.sync_frame(); });
  node.set_broadcast([&](const Bytes& f) { transport.broadcast(f); });
  transport.start();
  std::cout << "replica " << id << " listening " << transport.port() << std::endl;

  std::vector<std::string> ids;
  std::vector<fs::path> metas;
  for (const auto& p : plugins) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--plugin wants ID=METADATA, got " + p);
    ids.push_back(p.substr(0, eq));
    metas.push_back(p.substr(eq + 1));
  }
  if (!ids.empty()) {
    for (const auto& r : host.integrate(ids, metas)) {
      std::cout << "plugin " << r.plugin_id << " " << plugin::to_string(r.code);
      if (!r.message.empty()) std::cout << " " << r.message;
      std::cout << std::endl;
    }
  }

  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> lines;
  bool eof = false;
  std::thread input([&] {
    std::string line;
    while (std::getline(std::cin, line)) {
      std::lock_guard lock(mu);
      lines.push_back(line);
      cv.notify_one();
    }
    std::lock_guard lock(mu);
    eof = true;
    cv.notify_one();
  });
  input.detach();

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto next_sync = std::chrono::steady_clock::now() + std::chrono::milliseconds(sync_ms);
  bool running = true;
  while (running && !g_stop) {
    std::deque<std::string> batch;
    {
      std::unique_lock lock(mu);
      cv.wait_for(lock, std::chrono::milliseconds(50), [&] { return !lines.empty(); });
      batch.swap(lines);
    }
    for (const auto& l : batch) {
      if (l.empty()) continue;
      try {
        if (!control(node, l)) running = false;
      } catch (const std::exception& e) {
        std::cout << "error " << e.what() << std::endl;
      }
    }
    if (sync_ms > 0 && std::chrono::steady_clock::now() >= next_sync) {
      node.sync();
      next_sync = std::chrono::steady_clock::now() + std::chrono::milliseconds(sync_ms);
    }
    if (node.halted()) {
      std::cerr << "storage failed; replica halted" << std::endl;
      running = false;
    }
  }
  (void)eof;
  transport.stop();
  std::cout << "digest " << to_hex(node.digest()) << std::endl;
  return node.halted() ? 1 : 0;
}

// ---------------------------------------------------------------- vectors

int cmd_vectors(const std::string& out, const std::string& check) {
  if (!out.empty()) {
    const auto v = harness::golden_vectors();
    harness::write_vectors(out, v);
    std::cout << "wrote " << v.size() << " vectors to " << out << "\n";
  }
  if (!check.empty()) {
    std::size_t bad = 0;
    const auto results = harness::check_vectors(check);
    for (const auto& r : results) {
      if (!r.ok) {
        ++bad;
        std::cout << "FAIL " << r.file << ": " << r.detail << "\n";
      }
    }
    std::cout << results.size() - bad << "/" << results.size() << " vectors pass\n";
    return bad == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyrdl: replicated counters, sets and maps"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "latency, memory and throughput per data type and op count");
  std::string types = "counter,set,map", ops = "100,1000,10000", out;
  std::size_t reps = 5;
  std::uint64_t bench_seed = 1;
  bool in_process = false;
  bench->add_option("--types", types, "comma-separated: counter,set,map");
  bench->add_option("--ops", ops, "comma-separated op counts");
  bench->add_option("--out", out, "CSV file (default: stdout)");
  bench->add_option("--reps", reps, "timed repetitions per cell");
  bench->add_option("--seed", bench_seed, "workload seed");
  bench->add_flag("--in-process", in_process, "skip the per-cell child process (no memory column)");

  auto* sim = app.add_subcommand("sim", "run scenarios on the simulated network and check them against the oracle");
  std::string scenario, trace;
  std::optional<std::uint64_t> sim_seed;
  std::size_t count = 1;
  bool dump = false;
  sim->add_option("--scenario", scenario, "scenario JSON (default: a random one per seed)");
  sim->add_option("--seed", sim_seed, "seed; overrides the scenario's");
  sim->add_option("--count", count, "run this many consecutive seeds");
  sim->add_option("--trace", trace, "write the delivery trace here on divergence");
  sim->add_flag("--dump", dump, "print each scenario as JSON");

  auto* replica = app.add_subcommand("replica", "long-running replica over TCP");
  std::string id, listen = ":0", peers, data_dir;
  std::vector<std::string> plugins;
  std::uint64_t sync_ms = 500, snapshot_every = 1000;
  replica->add_option("--id", id, "replica id")->required();
  replica->add_option("--listen", listen, "host:port or :port");
  replica->add_option("--peers", peers, "comma-separated host:port list");
  replica->add_option("--data-dir", data_dir, "durable state; memory-only when omitted");
  replica->add_option("--plugin", plugins, "ID=METADATA.json, in integration order");
  replica->add_option("--sync-interval", sync_ms, "ms between sync broadcasts, 0 for manual");
  replica->add_option("--snapshot-every", snapshot_every, "WAL records between snapshots, 0 never");

  auto* vectors = app.add_subcommand("vectors", "write or check golden CDF vectors");
  std::string vec_out, vec_check;
  vectors->add_option("--out", vec_out, "directory to write");
  vectors->add_option("--check", vec_check, "directory to check");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*bench) return cmd_bench(types, ops, out, reps, bench_seed, in_process);
    if (*sim) return cmd_sim(scenario, sim_seed, count, trace, dump);
    if (*replica) return cmd_replica(id, listen, peers, data_dir, plugins, sync_ms, snapshot_every);
    if (*vectors) return cmd_vectors(vec_out, vec_check);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
