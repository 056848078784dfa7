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

#ifndef POLYRDL_CORE_REPLICA_HPP_
#define POLYRDL_CORE_REPLICA_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyrdl/core/state.hpp"
#include "polyrdl/core/types.hpp"
#include "polyrdl/core/version_vector.hpp"
#include "polyrdl/core/view.hpp"

namespace polyrdl {

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const Digest& d);

enum class ApplyResult : std::uint8_t {
  kApplied,
  kDuplicate,
  kStaleEpoch,
  // Epoch is ahead of ours and the Reset that opens it has not arrived yet.
  // The update is held and applied once the epoch catches up.
  kDeferred,
};

std::string_view to_string(ApplyResult r);

struct ReplicaConfig {
  std::size_t max_deferred = 1 << 20;
};

enum class CommitOrigin : std::uint8_t { kLocal, kRemote };

/// Passed to the commit listener after an update's effect is in the store
/// and the log. Views are filled only when the listener asked for them and
/// the update is not a Reset.
struct Commit {
  const Update& update;
  CommitOrigin origin;
  const ValueView* before = nullptr;
  const ValueView* after = nullptr;
};

using CommitListener = std::function<void(const Commit&)>;

/// Everything needed to bring a replica back after a restart.
struct ReplicaImage {
  std::string replica_id;
  std::uint64_t epoch = 0;
  std::uint64_t clock = 0;
  std::uint64_t next_seq = 1;
  VersionVector known;
  Bytes objects;  // canonical state encoding
  std::vector<Update> log;

  friend bool operator==(const ReplicaImage&, const ReplicaImage&) = default;
};

class Replica {
 public:
  explicit Replica(std::string replica_id, ReplicaConfig config = {});

  static Replica from_image(const ReplicaImage& image, ReplicaConfig config = {});
  ReplicaImage image() const;

  const std::string& id() const { return id_; }
  std::uint64_t clock() const { return clock_; }
  std::uint64_t epoch() const { return epoch_; }
  std::uint64_t next_seq() const { return next_seq_; }

  /// Access. Absent objects resolve to the empty view of `hint`, or to
  /// AbsentView when no hint is given.
  ValueView access(std::string_view object_id, std::optional<ObjectType> hint = std::nullopt) const;

  /// Update, as called by the application. Throws Error{kTypeMismatch} when
  /// the op does not belong to `type`, Error{kResetNotAllowed} for Reset.
  Update local_update(std::string object_id, ObjectType type, OpPayload op);

  /// Emits Reset{epoch + 1, snapshot} from this replica.
  Update issue_reset(Bytes snapshot);

  /// Applies an update received from elsewhere (or replayed from the WAL).
  /// Throws Error{kMalformedUpdate} without touching state.
  ApplyResult apply_update(const Update& u);

  Digest digest() const;
  Bytes encode_state() const;

  const core::ObjectStore& objects() const { return objects_; }
  /// Current-epoch updates in commit order.
  const std::vector<Update>& log() const { return log_; }
  const VersionVector& known() const { return known_; }
  std::size_t deferred_count() const { return deferred_.size(); }
  std::uint64_t commit_count() const { return commit_count_; }

  void set_commit_listener(CommitListener listener, bool with_views = false);

 private:
  void commit(const Update& u, CommitOrigin origin, const core::ObjectStore* decoded_reset);
  void apply_reset(const Update& u, core::ObjectStore decoded);
  void release_deferred();
  void rebuild_reset_stamp();

  std::string id_;
  ReplicaConfig config_;
  std::uint64_t clock_ = 0;
  std::uint64_t epoch_ = 0;
  std::uint64_t next_seq_ = 1;
  core::ObjectStore objects_;
  VersionVector known_;
  std::vector<Update> log_;
  std::map<UpdateId, Update> deferred_;
  std::optional<LamportStamp> reset_stamp_;  // winning Reset of the current epoch
  std::uint64_t commit_count_ = 0;
  CommitListener listener_;
  bool listener_views_ = false;
};

}  // namespace polyrdl

#endif  // POLYRDL_CORE_REPLICA_HPP_
