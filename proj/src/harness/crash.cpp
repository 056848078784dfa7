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

#include "polyrdl/harness/crash.hpp"

#include <algorithm>
#include <random>

#include "polyrdl/core/error.hpp"
#include "polyrdl/harness/generators.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/persist/storage.hpp"

namespace fs = std::filesystem;

namespace polyrdl::harness {

namespace {

OpPayload local_op(Rng& rng, ObjectType& type, std::string& object) {
  switch (rng() % 3) {
    case 0:
      type = ObjectType::kCounter;
      object = "c";
      return op::CounterAdd{static_cast<std::int64_t>(rng() % 9) - 4};
    case 1:
      type = ObjectType::kSet;
      object = "s";
      return op::SetAdd{to_bytes(rng() % 2 ? "x" : "y")};
    default:
      type = ObjectType::kMap;
      object = "m";
      return op::MapPut{rng() % 2 ? "k1" : "k2", static_cast<std::int64_t>(rng() % 5)};
  }
}

bool same_digest(const Replica& r, std::span<const Update> prefix) { return r.digest() == oracle_digest(prefix); }

}  // namespace

CrashSweepResult crash_sweep(const fs::path& scratch, std::size_t updates, std::uint64_t seed) {
  CrashSweepResult out;
  const fs::path live = scratch / "live";
  fs::remove_all(live);
  fs::create_directories(live);

  Rng rng(seed);
  std::vector<Update> committed;
  {
    persist::Storage storage(live);
    Replica r = storage.recover("R");
    r.set_commit_listener([&](const Commit& c) {
      storage.append(c.update);
      committed.push_back(c.update);
    });
    PoolOptions opt;
    opt.reset_weight = 0.03;
    opt.max_lamport = 40;
    std::vector<Update> pool = random_pool(rng, updates * 2, opt);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t next = 0;
    while (committed.size() < updates) {
      if (next < pool.size() && rng() % 3 != 0) {
        r.apply_update(pool[next++]);
      } else {
        ObjectType type;
        std::string object;
        OpPayload op = local_op(rng, type, object);
        r.local_update(object, type, std::move(op));
      }
    }
    r.set_commit_listener({});
  }

  const Bytes wal = persist::read_file(live / "wal.log");
  const persist::WalScan scan = persist::scan_wal(live / "wal.log");
  const std::size_t records = scan.record_ends.size();

  auto run_case = [&](std::uint64_t cut, std::size_t durable, bool torn) {
    const fs::path dir = scratch / "crash";
    fs::remove_all(dir);
    fs::create_directories(dir);
    persist::write_file_atomic(dir / "wal.log", std::span<const std::uint8_t>(wal).first(cut), false);
    torn ? ++out.torn_cases : ++out.cases;
    try {
      persist::Storage s(dir, persist::FsyncPolicy::kNone);
      Replica r = s.recover("R");
      const std::span<const Update> prefix(committed.data(), durable);
      bool ok = same_digest(r, prefix);
      // Recovering again from what the first recovery left must not move.
      persist::Storage again(dir, persist::FsyncPolicy::kNone);
      ok = ok && again.recover("R").digest() == r.digest();
      if (ok) {
        torn ? ++out.torn_matches : ++out.matches;
      } else {
        out.failures.push_back("crash after " + std::to_string(durable) + (torn ? " records (torn)" : " records"));
      }
    } catch (const std::exception& e) {
      out.failures.push_back("crash after " + std::to_string(durable) + ": " + e.what());
    }
  };

  for (std::size_t k = 1; k <= records; ++k) {
    run_case(scan.record_ends[k - 1], k, false);
    if (k < records) {
      const std::uint64_t start = scan.record_ends[k - 1];
      run_case(start + (scan.record_ends[k] - start) / 2, k, true);
    }
  }
  return out;
}

}  // namespace polyrdl::harness
