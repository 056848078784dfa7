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

#ifndef POLYRDL_CDF_CODEC_HPP_
#define POLYRDL_CDF_CODEC_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/state.hpp"
#include "polyrdl/core/types.hpp"
#include "polyrdl/core/view.hpp"

namespace polyrdl::cdf {

// Updates: replica_id, seq, lamport, epoch, object_id, object_type, op_kind,
// then the op's fields in declaration order.
Bytes encode_update(const Update& u);
void encode_update(Writer& w, const Update& u);
Update decode_update(std::span<const std::uint8_t> in);
Update decode_update(Reader& r);

/// op_kind byte followed by the op's fields; no validation.
void encode_op(Writer& w, const OpPayload& op);
OpPayload decode_op(Reader& r);

void encode_scalar(Writer& w, const Scalar& s);
Scalar decode_scalar(Reader& r);

struct SyncMessage {
  std::string sender;
  std::uint64_t sender_epoch = 0;
  std::vector<std::pair<std::string, std::uint64_t>> version_vector;  // sorted by replica_id
  std::vector<Update> updates;  // sorted by (replica_id, seq), no duplicates

  friend bool operator==(const SyncMessage&, const SyncMessage&) = default;
};

Bytes encode_sync(const SyncMessage& m);
/// Validates ordering and uniqueness; throws kMalformedSync otherwise.
SyncMessage decode_sync(std::span<const std::uint8_t> in);

// Plug-in protocol payloads.

struct PluginHello {
  std::string plugin_id;
  std::uint32_t schema_version = 0;
  friend bool operator==(const PluginHello&, const PluginHello&) = default;
};

struct PluginEvent {
  std::uint64_t event_seq = 0;
  std::uint64_t reply_to = 0;  // cmd_seq this event answers, 0 if unsolicited
  std::string core_function;
  std::string replica_id;
  std::optional<Update> update;
  Bytes result_view;
  friend bool operator==(const PluginEvent&, const PluginEvent&) = default;
};

struct PluginCommand {
  std::uint64_t cmd_seq = 0;
  std::string core_function;
  Bytes args;
  friend bool operator==(const PluginCommand&, const PluginCommand&) = default;
};

struct PluginError {
  std::uint64_t ref_seq = 0;
  std::uint16_t code = 0;
  std::string message;
  friend bool operator==(const PluginError&, const PluginError&) = default;
};

Bytes encode_hello(const PluginHello& h);
PluginHello decode_hello(std::span<const std::uint8_t> in);
Bytes encode_event(const PluginEvent& e);
PluginEvent decode_event(std::span<const std::uint8_t> in);
Bytes encode_command(const PluginCommand& c);
PluginCommand decode_command(std::span<const std::uint8_t> in);
Bytes encode_error(const PluginError& e);
PluginError decode_error(std::span<const std::uint8_t> in);

// Canonical state encoding: objects sorted by id, every nested collection
// sorted, so equal states give equal bytes. The digest is its SHA-256.
Bytes encode_state(const core::ObjectStore& store);
core::ObjectStore decode_state(std::span<const std::uint8_t> in);

void encode_stamp(Writer& w, const LamportStamp& s);
LamportStamp decode_stamp(Reader& r);

/// Value views as carried in plug-in events and command replies.
Bytes encode_view(const ValueView& v);
ValueView decode_view(std::span<const std::uint8_t> in);
void encode_view(Writer& w, const ValueView& v);
ValueView decode_view(Reader& r);

}  // namespace polyrdl::cdf

#endif  // POLYRDL_CDF_CODEC_HPP_
