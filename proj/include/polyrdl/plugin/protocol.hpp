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

#ifndef POLYRDL_PLUGIN_PROTOCOL_HPP_
#define POLYRDL_PLUGIN_PROTOCOL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/core/types.hpp"
#include "polyrdl/core/view.hpp"

namespace polyrdl::plugin {

/// The core functions a plug-in may subscribe to or invoke.
inline constexpr std::array<std::string_view, 4> kCoreFunctions = {"access", "update", "sync", "merge"};
bool is_core_function(std::string_view name);

// PluginError codes. Rejections raised by the core travel as
// kCoreErrorBase + Errc.
enum ErrorCode : std::uint16_t {
  kPermissionDenied = 1,
  kBadArgs = 2,
  kUnknownFunction = 3,
  kCoreErrorBase = 0x100,
};

// Command arguments, one layout per function:
//   access: str object_id, u8 type hint (0 = none). An empty object_id asks
//           for the whole replica instead (see SnapshotReply).
//   update: str object_id, u8 object_type, op (op_kind + fields)
//   sync:   nothing
//   merge:  an encoded SyncMessage

struct AccessArgs {
  std::string object_id;
  std::optional<ObjectType> hint;
};
struct UpdateArgs {
  std::string object_id;
  ObjectType object_type = ObjectType::kCounter;
  OpPayload op;
};

Bytes encode_access_args(const AccessArgs& a);
AccessArgs decode_access_args(std::span<const std::uint8_t> in);
Bytes encode_update_args(const UpdateArgs& a);
UpdateArgs decode_update_args(std::span<const std::uint8_t> in);

// Result payloads carried in PluginEvent.result_view.

/// update and merge events: the object's value before and after.
struct ChangeViews {
  ValueView before;
  ValueView after;
};
Bytes encode_change(const ChangeViews& c);
ChangeViews decode_change(std::span<const std::uint8_t> in);

/// access with an empty object id.
struct SnapshotReply {
  std::uint64_t epoch = 0;
  std::uint64_t clock = 0;
  std::vector<std::pair<std::string, std::uint64_t>> version_vector;
  Bytes state;  // canonical state encoding
};
Bytes encode_snapshot_reply(const SnapshotReply& s);
SnapshotReply decode_snapshot_reply(std::span<const std::uint8_t> in);

struct SyncStats {
  std::uint64_t updates = 0;
  std::uint64_t bytes = 0;
  std::uint64_t epoch = 0;
};
Bytes encode_sync_stats(const SyncStats& s);
SyncStats decode_sync_stats(std::span<const std::uint8_t> in);

struct MergeStats {
  std::uint64_t applied = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t stale = 0;
  std::uint64_t deferred = 0;
  std::string error;
};
Bytes encode_merge_stats(const MergeStats& s);
MergeStats decode_merge_stats(std::span<const std::uint8_t> in);

/// What a command produced: an event to send back, or an error.
struct CommandReply {
  std::optional<cdf::PluginEvent> event;
  std::optional<cdf::PluginError> error;
};

/// Implemented by the host; runs one command on the replica's event loop.
class CommandExecutor {
 public:
  virtual ~CommandExecutor() = default;
  virtual CommandReply execute(const cdf::PluginCommand& cmd) = 0;
};

}  // namespace polyrdl::plugin

#endif  // POLYRDL_PLUGIN_PROTOCOL_HPP_
