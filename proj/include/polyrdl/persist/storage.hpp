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

#ifndef POLYRDL_PERSIST_STORAGE_HPP_
#define POLYRDL_PERSIST_STORAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polyrdl/core/replica.hpp"

namespace polyrdl::persist {

std::uint32_t crc32c(std::span<const std::uint8_t> data);

enum class FsyncPolicy : std::uint8_t { kEveryRecord, kBatched, kNone };

// wal.log is a sequence of records:
//   u32 body_len | u32 crc32c(body) | body = encoded update
// A short or checksum-failing record that runs to the end of the file is a
// torn write and gets cut off; anything bad before the last record is
// corruption.

struct WalScan {
  std::vector<Update> updates;
  std::vector<std::uint64_t> record_ends;  // byte offset just past each record
  std::uint64_t valid_bytes = 0;
  std::uint64_t torn_bytes = 0;
};

/// Throws Error{kCorruption} on interior damage.
WalScan scan_wal(const std::filesystem::path& path);

class WalWriter {
 public:
  WalWriter() = default;
  WalWriter(const std::filesystem::path& path, FsyncPolicy policy);
  ~WalWriter();
  WalWriter(WalWriter&& o) noexcept;
  WalWriter& operator=(WalWriter&& o) noexcept;

  /// Throws Error{kIo}; the caller is expected to stop.
  void append(const Update& u);
  void sync();
  bool is_open() const { return fd_ >= 0; }
  std::uint64_t size() const { return size_; }
  std::uint64_t records() const { return records_; }

 private:
  int fd_ = -1;
  FsyncPolicy policy_ = FsyncPolicy::kEveryRecord;
  std::uint64_t size_ = 0;
  std::uint64_t records_ = 0;
  std::uint64_t unsynced_ = 0;
};

// Snapshot and checkpoint files end in a crc32c over everything before it.

Bytes encode_image(const ReplicaImage& image);
/// Throws Error{kCorruption}.
ReplicaImage decode_image(std::span<const std::uint8_t> in);

struct Checkpoint {
  std::string label;
  std::string replica_id;
  std::uint64_t epoch = 0;
  std::uint64_t clock = 0;
  std::vector<std::pair<std::string, std::uint64_t>> version_vector;
  Bytes body;  // canonical state encoding

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Bytes encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> in);

bool valid_label(const std::string& label);

/// Writes checkpoints/<label>.bin under `dir`. Throws kDuplicateLabel,
/// kInvalidArgument for labels outside [A-Za-z0-9._-], kIo.
void write_checkpoint(const std::filesystem::path& dir, const Checkpoint& c);
/// Throws kUnknownCheckpoint or kCorruption.
Checkpoint read_checkpoint(const std::filesystem::path& dir, const std::string& label);
std::vector<std::string> list_checkpoints(const std::filesystem::path& dir);

struct RecoveryInfo {
  std::optional<std::uint64_t> snapshot;  // id of the snapshot used
  std::size_t replayed = 0;                // WAL records fed to apply_update
  std::uint64_t torn_bytes = 0;
  std::vector<std::uint64_t> bad_snapshots;
};

/// One replica's data directory.
class Storage {
 public:
  Storage(std::filesystem::path dir, FsyncPolicy policy = FsyncPolicy::kEveryRecord);

  /// Loads the newest valid snapshot, replays the WAL on top and leaves the
  /// WAL open for appends. Throws kCorruption (damaged WAL) or
  /// kUnrecoverable (damaged WAL and no usable snapshot).
  Replica recover(const std::string& replica_id, ReplicaConfig config = {});
  const RecoveryInfo& info() const { return info_; }

  void append(const Update& u);
  void sync() { wal_.sync(); }

  /// Persists the replica and prunes what the previous snapshot covers.
  /// Returns the new snapshot id.
  std::uint64_t write_snapshot(const Replica& r);
  void checkpoint(const std::string& label, const Replica& r);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path wal_path() const { return dir_ / "wal.log"; }
  std::filesystem::path snapshot_path(std::uint64_t id) const;
  std::vector<std::uint64_t> snapshot_ids() const;

 private:
  std::filesystem::path dir_;
  FsyncPolicy policy_;
  WalWriter wal_;
  // WAL size when the newest snapshot was taken; everything before it is
  // covered by that snapshot.
  std::uint64_t wal_mark_ = 0;
  RecoveryInfo info_;
};

/// Writes `data` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data, bool durable);
Bytes read_file(const std::filesystem::path& path);

}  // namespace polyrdl::persist

#endif  // POLYRDL_PERSIST_STORAGE_HPP_
