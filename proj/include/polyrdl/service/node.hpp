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

#ifndef POLYRDL_SERVICE_NODE_HPP_
#define POLYRDL_SERVICE_NODE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/core/replica.hpp"
#include "polyrdl/persist/storage.hpp"
#include "polyrdl/plugin/protocol.hpp"
#include "polyrdl/sync/sync.hpp"

namespace polyrdl::service {

struct NodeOptions {
  std::string id;
  // Without a data directory the node is memory-only.
  std::optional<std::filesystem::path> data_dir;
  persist::FsyncPolicy fsync = persist::FsyncPolicy::kEveryRecord;
  // Write a snapshot after this many WAL records; 0 never does.
  std::uint64_t snapshot_every = 0;
  ReplicaConfig replica;
};

/// Receives every committed effect, after it is durable, in commit order.
using EventSink = std::function<void(std::string_view core_function, const Update* update, Bytes result_view)>;
/// Carries an encoded SYNC frame to every other replica.
using BroadcastFn = std::function<void(const Bytes& frame)>;

/// One replica with its storage, behind a single lock that serves as the
/// replica's mailbox: application calls, transport deliveries and plug-in
/// commands all take it, so the replica is never mutated concurrently.
class Node : public plugin::CommandExecutor {
 public:
  explicit Node(NodeOptions opt);
  ~Node() override;
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  void set_broadcast(BroadcastFn fn);
  void set_event_sink(EventSink sink);

  ValueView access(std::string_view object_id, std::optional<ObjectType> hint = std::nullopt);
  Update update(std::string object_id, ObjectType type, OpPayload op);
  /// Reset to `snapshot` (canonical state bytes) at the next epoch.
  Update reset(Bytes snapshot);
  /// Builds the full-log sync message, broadcasts it and returns it.
  cdf::SyncMessage sync();
  sync::MergeReport merge(const cdf::SyncMessage& m);

  /// Transport entry point. SYNC frames are merged; anything else is ignored.
  void on_frame(const cdf::Frame& f);
  /// The frame to send on a fresh connection: our full sync.
  Bytes sync_frame();

  plugin::CommandReply execute(const cdf::PluginCommand& cmd) override;

  std::uint64_t write_snapshot();
  void checkpoint(const std::string& label);

  const std::string& id() const { return opt_.id; }
  const NodeOptions& options() const { return opt_; }
  Digest digest() const;
  std::uint64_t epoch() const;
  Bytes encode_state() const;
  plugin::SnapshotReply snapshot() const;
  /// Runs `fn` with the lock held.
  void inspect(const std::function<void(const Replica&)>& fn) const;

  std::uint64_t local_commits() const;
  const sync::MergeReport& merge_totals() const { return merge_totals_; }
  const std::optional<persist::RecoveryInfo>& recovery() const { return recovery_; }
  bool halted() const { return halted_; }

 private:
  void on_commit(const Commit& c);
  void check_running() const;
  void maybe_snapshot();
  plugin::CommandReply run_command(const cdf::PluginCommand& cmd);

  NodeOptions opt_;
  mutable std::mutex mu_;
  std::unique_ptr<persist::Storage> storage_;
  std::optional<Replica> replica_;
  std::optional<persist::RecoveryInfo> recovery_;
  BroadcastFn broadcast_;
  EventSink sink_;
  std::uint64_t local_commits_ = 0;
  std::uint64_t since_snapshot_ = 0;
  sync::MergeReport merge_totals_;
  bool halted_ = false;
};

}  // namespace polyrdl::service

#endif  // POLYRDL_SERVICE_NODE_HPP_
