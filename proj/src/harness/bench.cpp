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

#include "polyrdl/harness/bench.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/core/replica.hpp"
#include "polyrdl/harness/workload.hpp"
#include "polyrdl/sync/sync.hpp"

namespace polyrdl::harness {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

// Bench workloads differ from the scenario mix in one way: every map key
// keeps one value type (register, counter or set, by key index), as
// application data does. The scenario generator flips types on purpose.
constexpr std::size_t kNestedElements = 8;
constexpr std::size_t kMapKeys = 16;

LocalOp bench_op(Rng& rng, const Replica& r, ObjectType type, std::size_t alphabet) {
  LocalOp out;
  out.type = type;
  auto delta = [&] { return static_cast<std::int64_t>(rng() % 21) - 10; };
  auto element = [&] { return to_bytes("e" + std::to_string(rng() % alphabet)); };
  switch (type) {
    case ObjectType::kCounter:
      out.object_id = "c";
      out.op = op::CounterAdd{delta()};
      break;
    case ObjectType::kSet: {
      out.object_id = "s";
      Bytes e = element();
      if (rng() % 3 == 0) {
        out.op = op::SetRemove{e, observed_tags(r, "s", e)};
      } else {
        out.op = op::SetAdd{std::move(e)};
      }
      break;
    }
    case ObjectType::kMap: {
      out.object_id = "m";
      const std::size_t k = rng() % std::min(alphabet, kMapKeys);
      const std::string key = "k" + std::to_string(k);
      if (rng() % 500 == 0) {
        out.op = op::MapRemoveKey{key};
        break;
      }
      if (k % 8 == 0) {
        out.op = op::MapPut{key, static_cast<std::int64_t>(rng() % 1000)};
      } else if (k % 2 == 0) {
        out.op = op::MapCounterAdd{key, delta()};
      } else {
        // Nested sets stay small so a whole-map read costs about the same
        // at every workload size.
        Bytes e = to_bytes("e" + std::to_string(rng() % kNestedElements));
        if (rng() % 3 == 0) {
          out.op = op::MapSetRemove{key, e, observed_tags(r, "m", key, e)};
        } else {
          out.op = op::MapSetAdd{key, std::move(e)};
        }
      }
      break;
    }
  }
  return out;
}

struct RepStats {
  std::int64_t total_ns = 0;
  std::int64_t sync_ns = 0;
  std::uint64_t updates = 0, accesses = 0, syncs = 0, applied = 0;
};

RepStats run_rep(ObjectType type, std::size_t ops, const BenchConfig& cfg, std::uint64_t seed) {
  const std::string obj = type == ObjectType::kCounter ? "c" : type == ObjectType::kSet ? "s" : "m";
  Replica a("A");
  Replica b("B");
  Rng rng(seed);
  const double total = cfg.mix.update + cfg.mix.access + cfg.mix.sync;
  std::uniform_real_distribution<double> coin(0.0, total);
  std::size_t sent = 0;
  RepStats st;
  for (std::size_t i = 0; i < ops; ++i) {
    const double c = coin(rng);
    if (c < cfg.mix.update) {
      LocalOp op = bench_op(rng, a, type, cfg.alphabet);  // generation is not timed
      const auto t0 = Clock::now();
      a.local_update(op.object_id, op.type, std::move(op.op));
      st.total_ns += ns_since(t0);
      ++st.updates;
    } else if (c < cfg.mix.update + cfg.mix.access) {
      const auto t0 = Clock::now();
      const ValueView v = a.access(obj, type);
      st.total_ns += ns_since(t0);
      if (v.index() == 0 && a.objects().count(obj)) throw Error(Errc::kInvalidArgument, "empty view");
      ++st.accesses;
    } else {
      // Propagate the delta to the peer and merge it there.
      const auto t0 = Clock::now();
      const Bytes frame = cdf::encode_frame(cdf::MsgType::kSync, cdf::encode_sync(sync::make_sync_from(a, sent)));
      std::span<const std::uint8_t> in(frame);
      const cdf::Frame f = cdf::decode_frame(in);
      const sync::MergeReport rep = sync::merge_sync(b, cdf::decode_sync(f.payload));
      const std::int64_t dt = ns_since(t0);
      sent = a.log().size();
      st.total_ns += dt;
      st.sync_ns += dt;
      st.applied += rep.applied;
      ++st.syncs;
    }
  }
  return st;
}

std::optional<std::uint64_t> statm_field(int index) {
  std::ifstream in("/proc/self/statm");
  std::uint64_t v = 0;
  for (int i = 0; i <= index; ++i) {
    if (!(in >> v)) return std::nullopt;
  }
  return v * static_cast<std::uint64_t>(::sysconf(_SC_PAGESIZE));
}

bool read_all(int fd, void* buf, std::size_t n) {
  auto* p = static_cast<char*>(buf);
  while (n > 0) {
    const ssize_t r = ::read(fd, p, n);
    if (r <= 0) return false;
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

// Fixed-size image of a row for the trip back from the child.
struct RowImage {
  double mean_op, sync, throughput, mean_total, stdev_total, min_total;
  std::uint64_t op_count, peak, has_peak, updates, accesses, syncs, applied;
};

BenchRow run_isolated(ObjectType type, std::size_t ops, const BenchConfig& cfg) {
  int fds[2];
  if (::pipe(fds) != 0) throw Error(Errc::kIo, "pipe failed");
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(Errc::kIo, "fork failed");
  if (pid == 0) {
    ::close(fds[0]);
    std::atomic<bool> done{false};
    std::atomic<std::uint64_t> sampled{0};
    std::thread sampler([&] {
      while (!done) {
        if (auto r = current_rss_bytes(); r && *r > sampled) sampled = *r;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    });
    RowImage img{};
    try {
      const BenchRow row = bench_cell(type, ops, cfg);
      done = true;
      sampler.join();
      const auto hwm = peak_rss_bytes();
      img = {row.mean_op_latency_ns, row.sync_latency_ns, row.throughput_ops_s, row.mean_total_ns,
             row.stdev_total_ns, row.min_total_ns, row.op_count, std::max<std::uint64_t>(sampled, hwm.value_or(0)),
             (hwm || sampled > 0) ? 1u : 0u, row.updates, row.accesses, row.syncs, row.applied_at_peer};
    } catch (...) {
      done = true;
      sampler.join();
      ::_exit(2);
    }
    const bool ok = ::write(fds[1], &img, sizeof img) == static_cast<ssize_t>(sizeof img);
    ::_exit(ok ? 0 : 3);
  }
  ::close(fds[1]);
  RowImage img{};
  const bool got = read_all(fds[0], &img, sizeof img);
  ::close(fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (!got || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(Errc::kIo, "bench child for " + data_type_name(type) + "/" + std::to_string(ops) + " failed");
  }
  BenchRow row;
  row.data_type = data_type_name(type);
  row.op_count = img.op_count;
  row.mean_op_latency_ns = img.mean_op;
  row.sync_latency_ns = img.sync;
  row.throughput_ops_s = img.throughput;
  row.mean_total_ns = img.mean_total;
  row.stdev_total_ns = img.stdev_total;
  row.min_total_ns = img.min_total;
  if (img.has_peak) row.peak_rss_bytes = img.peak;
  row.updates = img.updates;
  row.accesses = img.accesses;
  row.syncs = img.syncs;
  row.applied_at_peer = img.applied;
  return row;
}

}  // namespace

ObjectType parse_data_type(const std::string& s) {
  if (s == "counter") return ObjectType::kCounter;
  if (s == "set") return ObjectType::kSet;
  if (s == "map") return ObjectType::kMap;
  throw Error(Errc::kInvalidArgument, "unknown data type " + s);
}

std::string data_type_name(ObjectType t) {
  switch (t) {
    case ObjectType::kCounter: return "counter";
    case ObjectType::kSet: return "set";
    case ObjectType::kMap: return "map";
  }
  return "?";
}

std::optional<std::uint64_t> current_rss_bytes() { return statm_field(1); }

std::optional<std::uint64_t> peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream f(line.substr(6));
      std::uint64_t kb = 0;
      if (f >> kb) return kb * 1024;
    }
  }
  return std::nullopt;
}

BenchRow bench_cell(ObjectType type, std::size_t ops, const BenchConfig& cfg) {
  BenchRow row;
  row.data_type = data_type_name(type);
  row.op_count = ops;
  const std::size_t reps = std::max<std::size_t>(1, cfg.repetitions);
  std::vector<double> totals;
  double sync_ns = 0;
  std::uint64_t syncs = 0;
  // One untimed warm-up so the first repetition does not pay for page faults
  // the others skip.
  run_rep(type, ops, cfg, cfg.seed);
  for (std::size_t r = 0; r < reps; ++r) {
    // Same seed every time: the counts are part of the result.
    const RepStats st = run_rep(type, ops, cfg, cfg.seed);
    totals.push_back(static_cast<double>(st.total_ns));
    sync_ns += static_cast<double>(st.sync_ns);
    syncs += st.syncs;
    row.updates = st.updates;
    row.accesses = st.accesses;
    row.syncs = st.syncs;
    row.applied_at_peer = st.applied;
  }
  double mean = 0;
  for (double t : totals) mean += t;
  mean /= static_cast<double>(totals.size());
  double var = 0;
  for (double t : totals) var += (t - mean) * (t - mean);
  row.mean_total_ns = mean;
  row.stdev_total_ns = totals.size() > 1 ? std::sqrt(var / static_cast<double>(totals.size() - 1)) : 0.0;
  row.min_total_ns = *std::min_element(totals.begin(), totals.end());
  row.mean_op_latency_ns = ops ? mean / static_cast<double>(ops) : 0.0;
  row.sync_latency_ns = syncs ? sync_ns / static_cast<double>(syncs) : 0.0;
  row.throughput_ops_s = mean > 0 ? static_cast<double>(ops) * 1e9 / mean : 0.0;
  return row;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (ObjectType t : cfg.types) {
    for (std::size_t n : cfg.ops) {
      if (!cfg.isolate) {
        rows.push_back(bench_cell(t, n, cfg));
        continue;
      }
      // Keep the least disturbed child; peak memory is the worst seen.
      BenchRow best = run_isolated(t, n, cfg);
      for (std::size_t p = 1; p < cfg.processes; ++p) {
        BenchRow next = run_isolated(t, n, cfg);
        std::optional<std::uint64_t> peak = best.peak_rss_bytes;
        if (next.peak_rss_bytes) peak = std::max(peak.value_or(0), *next.peak_rss_bytes);
        if (next.min_total_ns < best.min_total_ns) best = std::move(next);
        best.peak_rss_bytes = peak;
      }
      rows.push_back(std::move(best));
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchCsvHeader << "\n";
  out << std::fixed << std::setprecision(1);
  for (const auto& r : rows) {
    out << r.data_type << ',' << r.op_count << ',' << r.mean_op_latency_ns << ',' << r.sync_latency_ns << ',';
    if (r.peak_rss_bytes) {
      out << *r.peak_rss_bytes;
    } else {
      out << "N/A";
    }
    out << ',' << r.throughput_ops_s << "\n";
  }
}

void print_bench_summary(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << std::left << std::setw(9) << "type" << std::right << std::setw(8) << "ops" << std::setw(16)
      << "total ms" << std::setw(12) << "+- ms" << std::setw(14) << "op ns" << std::setw(14) << "sync ns"
      << std::setw(14) << "peak MiB" << std::setw(16) << "ops/s" << "\n";
  out << std::fixed;
  for (const auto& r : rows) {
    out << std::left << std::setw(9) << r.data_type << std::right << std::setw(8) << r.op_count
        << std::setprecision(3) << std::setw(16) << r.mean_total_ns / 1e6 << std::setw(12) << r.stdev_total_ns / 1e6
        << std::setprecision(1) << std::setw(14) << r.mean_op_latency_ns << std::setw(14) << r.sync_latency_ns
        << std::setw(14);
    if (r.peak_rss_bytes) {
      out << std::setprecision(2) << static_cast<double>(*r.peak_rss_bytes) / (1024.0 * 1024.0);
    } else {
      out << "N/A";
    }
    out << std::setprecision(0) << std::setw(16) << r.throughput_ops_s << "\n";
  }
}

}  // namespace polyrdl::harness
