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

#include <fstream>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/harness/crash.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/persist/storage.hpp"
#include "test_util.hpp"

namespace polyrdl::persist {
namespace {

namespace fs = std::filesystem;
using polyrdl::testing::TempDir;

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return Errc::kInvalidArgument;
}

/// A replica whose commits go to its storage, as the service wires it.
struct Durable {
  explicit Durable(const fs::path& dir) : storage(dir), replica(storage.recover("R")) {
    replica.set_commit_listener([this](const Commit& c) { storage.append(c.update); });
  }
  Storage storage;
  Replica replica;
};

void add(Replica& r, std::int64_t d) { r.local_update("c", ObjectType::kCounter, op::CounterAdd{d}); }

std::int64_t counter(const Replica& r) { return std::get<CounterValue>(r.access("c", ObjectType::kCounter)).value; }

TEST(Crc32cTest, KnownVector) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32c(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())), 0xE3069283u);
}

TEST(StorageTest, EmptyDirRecoversFresh) {
  TempDir d;
  Storage s(d.path());
  Replica r = s.recover("R");
  EXPECT_EQ(r.clock(), 0u);
  EXPECT_EQ(r.digest(), Replica("X").digest());
}

TEST(StorageTest, AppendThenRecover) {
  TempDir d;
  Digest live;
  {
    Durable n(d.path());
    add(n.replica, 4);
    add(n.replica, 3);
    live = n.replica.digest();
  }
  Storage s(d.path());
  Replica r = s.recover("R");
  EXPECT_EQ(r.digest(), live);
  EXPECT_EQ(r.next_seq(), 3u);
  EXPECT_EQ(s.info().replayed, 2u);
}

TEST(StorageTest, TornFinalRecordTruncated) {
  TempDir d;
  {
    Durable n(d.path());
    for (int i = 0; i < 3; ++i) add(n.replica, 1);
  }
  const auto wal = d / "wal.log";
  const auto full = fs::file_size(wal);
  fs::resize_file(wal, full - 3);
  Storage s(d.path());
  Replica r = s.recover("R");
  EXPECT_EQ(counter(r), 2);
  EXPECT_GT(s.info().torn_bytes, 0u);
  EXPECT_EQ(fs::file_size(wal), scan_wal(wal).valid_bytes);
  // The log is writable again after the cut.
  r.set_commit_listener([&](const Commit& c) { s.append(c.update); });
  add(r, 10);
  Storage again(d.path());
  EXPECT_EQ(counter(again.recover("R")), 12);
}

TEST(StorageTest, InteriorCrcMismatchIsFatal) {
  TempDir d;
  {
    Durable n(d.path());
    for (int i = 0; i < 3; ++i) add(n.replica, 1);
  }
  const auto wal = d / "wal.log";
  Bytes b = read_file(wal);
  b[10] ^= 0xff;  // inside the first record body
  write_file_atomic(wal, b, false);
  Storage s(d.path());
  EXPECT_EQ(code_of([&] { s.recover("R"); }), Errc::kCorruption);
}

TEST(StorageTest, SnapshotOfEmptyState) {
  TempDir d;
  {
    Storage s(d.path());
    Replica r = s.recover("R");
    s.write_snapshot(r);
  }
  Storage s(d.path());
  Replica r = s.recover("R");
  EXPECT_EQ(s.info().snapshot, 1u);
  EXPECT_EQ(r.digest(), Replica("R").digest());
}

TEST(StorageTest, SnapshotPlusThreeUpdates) {
  TempDir d;
  Digest live;
  {
    Durable n(d.path());
    for (int i = 0; i < 5; ++i) add(n.replica, i);
    n.storage.write_snapshot(n.replica);
    add(n.replica, 7);
    n.replica.local_update("s", ObjectType::kSet, op::SetAdd{to_bytes("x")});
    n.replica.local_update("m", ObjectType::kMap, op::MapPut{"k", std::string("v")});
    live = n.replica.digest();
  }
  Storage s(d.path());
  Replica r = s.recover("R");
  EXPECT_EQ(r.digest(), live);
  EXPECT_EQ(s.info().snapshot, 1u);
}

TEST(StorageTest, SnapshotsPruneOlderState) {
  TempDir d;
  Durable n(d.path());
  for (int round = 0; round < 4; ++round) {
    for (int i = 0; i < 10; ++i) add(n.replica, 1);
    n.storage.write_snapshot(n.replica);
  }
  EXPECT_EQ(n.storage.snapshot_ids(), (std::vector<std::uint64_t>{3, 4}));
  // Records before snapshot 3 are gone; the rest back snapshot 4's fallback.
  EXPECT_EQ(scan_wal(n.storage.wal_path()).updates.size(), 10u);
}

TEST(StorageTest, CrashMidSnapshotFallsBack) {
  TempDir d;
  Digest live;
  {
    Durable n(d.path());
    for (int i = 0; i < 4; ++i) add(n.replica, 2);
    n.storage.write_snapshot(n.replica);
    for (int i = 0; i < 4; ++i) add(n.replica, 3);
    live = n.replica.digest();
  }
  // A second snapshot that never got renamed into place...
  {
    std::ofstream tmp(d / "snap-2.bin.tmp", std::ios::binary);
    tmp << "PRS1 half written";
  }
  // ...and one that was renamed but is damaged.
  {
    std::ofstream bad(d / "snap-3.bin", std::ios::binary);
    bad << "PRS1 garbage garbage";
  }
  Storage s(d.path());
  Replica r = s.recover("R");
  EXPECT_EQ(r.digest(), live);
  EXPECT_EQ(s.info().snapshot, 1u);
  EXPECT_EQ(s.info().bad_snapshots, (std::vector<std::uint64_t>{3}));
  EXPECT_FALSE(fs::exists(d / "snap-2.bin.tmp"));
}

TEST(StorageTest, CorruptSnapshotWithValidWalReplaysFromEmpty) {
  TempDir d;
  Digest live;
  {
    Durable n(d.path());
    for (int i = 0; i < 4; ++i) add(n.replica, 2);
    live = n.replica.digest();
  }
  {
    std::ofstream bad(d / "snap-1.bin", std::ios::binary);
    bad << "nope";
  }
  Storage s(d.path());
  EXPECT_EQ(s.recover("R").digest(), live);
  EXPECT_FALSE(s.info().snapshot.has_value());
}

TEST(StorageTest, BothCorruptIsUnrecoverable) {
  TempDir d;
  {
    Durable n(d.path());
    for (int i = 0; i < 4; ++i) add(n.replica, 2);
  }
  Bytes b = read_file(d / "wal.log");
  b[10] ^= 0xff;
  write_file_atomic(d / "wal.log", b, false);
  {
    std::ofstream bad(d / "snap-1.bin", std::ios::binary);
    bad << "nope";
  }
  Storage s(d.path());
  EXPECT_EQ(code_of([&] { s.recover("R"); }), Errc::kUnrecoverable);
}

TEST(StorageTest, ImageRoundTrip) {
  Replica r("R");
  add(r, 5);
  r.local_update("s", ObjectType::kSet, op::SetAdd{to_bytes("q")});
  const ReplicaImage img = r.image();
  EXPECT_EQ(decode_image(encode_image(img)), img);
  Bytes b = encode_image(img);
  b[b.size() / 2] ^= 1;
  EXPECT_EQ(code_of([&] { decode_image(b); }), Errc::kCorruption);
}

TEST(CheckpointTest, DuplicateLabelRejected) {
  TempDir d;
  Storage s(d.path());
  Replica r = s.recover("R");
  add(r, 10);
  s.checkpoint("c1", r);
  EXPECT_EQ(code_of([&] { s.checkpoint("c1", r); }), Errc::kDuplicateLabel);
  const Checkpoint c = read_checkpoint(d.path(), "c1");
  EXPECT_EQ(c.body, r.encode_state());
  EXPECT_EQ(c.clock, 1u);
  EXPECT_EQ(list_checkpoints(d.path()), (std::vector<std::string>{"c1"}));
}

TEST(CheckpointTest, UnknownAndInvalidLabels) {
  TempDir d;
  EXPECT_EQ(code_of([&] { read_checkpoint(d.path(), "missing"); }), Errc::kUnknownCheckpoint);
  EXPECT_FALSE(valid_label("../x"));
  EXPECT_FALSE(valid_label(""));
  EXPECT_TRUE(valid_label("before-deploy.2"));
}

TEST(CheckpointTest, SelfValidating) {
  Checkpoint c{"c", "R", 2, 9, {{"A", 3}}, Bytes{0, 0, 0, 0}};
  Bytes b = encode_checkpoint(c);
  EXPECT_EQ(decode_checkpoint(b), c);
  b[6] ^= 0x20;
  EXPECT_EQ(code_of([&] { decode_checkpoint(b); }), Errc::kCorruption);
}

TEST(CrashSweepTest, EveryRecordBoundary) {
  TempDir d;
  const auto res = harness::crash_sweep(d.path(), 100, 17);
  for (const auto& f : res.failures) ADD_FAILURE() << f;
  EXPECT_EQ(res.cases, 100u);
  EXPECT_EQ(res.matches, 100u);
  EXPECT_EQ(res.torn_matches, res.torn_cases);
}

}  // namespace
}  // namespace polyrdl::persist
