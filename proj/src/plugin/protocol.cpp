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

#include "polyrdl/plugin/protocol.hpp"

#include <algorithm>

#include "polyrdl/cdf/wire.hpp"

namespace polyrdl::plugin {

bool is_core_function(std::string_view name) {
  return std::find(kCoreFunctions.begin(), kCoreFunctions.end(), name) != kCoreFunctions.end();
}

Bytes encode_access_args(const AccessArgs& a) {
  cdf::Writer w;
  w.str(a.object_id);
  w.u8(a.hint ? static_cast<std::uint8_t>(*a.hint) : 0);
  return w.take();
}

AccessArgs decode_access_args(std::span<const std::uint8_t> in) {
  cdf::Reader r(in);
  AccessArgs a;
  a.object_id = r.str();
  const std::uint8_t hint = r.u8();
  if (hint != 0) {
    if (!valid_object_type(hint)) throw cdf::DecodeError(cdf::DecodeErrc::kUnknownTag, "unknown type hint");
    a.hint = static_cast<ObjectType>(hint);
  }
  r.expect_done();
  return a;
}

Bytes encode_update_args(const UpdateArgs& a) {
  cdf::Writer w;
  w.str(a.object_id);
  w.u8(static_cast<std::uint8_t>(a.object_type));
  cdf::encode_op(w, a.op);
  return w.take();
}

UpdateArgs decode_update_args(std::span<const std::uint8_t> in) {
  cdf::Reader r(in);
  UpdateArgs a;
  a.object_id = r.str();
  const std::uint8_t type = r.u8();
  if (!valid_object_type(type)) throw cdf::DecodeError(cdf::DecodeErrc::kUnknownTag, "unknown object type");
  a.object_type = static_cast<ObjectType>(type);
  a.op = cdf::decode_op(r);
  r.expect_done();
  return a;
}

Bytes encode_change(const ChangeViews& c) {
  cdf::Writer w;
  w.bytes(cdf::encode_view(c.before));
  w.bytes(cdf::encode_view(c.after));
  return w.take();
}

ChangeViews decode_change(std::span<const std::uint8_t> in) {
  cdf::Reader r(in);
  ChangeViews c;
  c.before = cdf::decode_view(r.bytes());
  c.after = cdf::decode_view(r.bytes());
  r.expect_done();
  return c;
}

Bytes encode_snapshot_reply(const SnapshotReply& s) {
  cdf::Writer w;
  w.u64(s.epoch);
  w.u64(s.clock);
  w.count(s.version_vector.size());
  for (const auto& [rid, seq] : s.version_vector) {
    w.str(rid);
    w.u64(seq);
  }
  w.bytes(s.state);
  return w.take();
}

SnapshotReply decode_snapshot_reply(std::span<const std::uint8_t> in) {
  cdf::Reader r(in);
  SnapshotReply s;
  s.epoch = r.u64();
  s.clock = r.u64();
  for (std::size_t n = r.count(12); n > 0; --n) {
    std::string rid = r.str();
    const std::uint64_t seq = r.u64();
    s.version_vector.emplace_back(std::move(rid), seq);
  }
  s.state = r.bytes();
  r.expect_done();
  return s;
}

Bytes encode_sync_stats(const SyncStats& s) {
  cdf::Writer w;
  w.u64(s.updates);
  w.u64(s.bytes);
  w.u64(s.epoch);
  return w.take();
}

SyncStats decode_sync_stats(std::span<const std::uint8_t> in) {
  cdf::Reader r(in);
  SyncStats s;
  s.updates = r.u64();
  s.bytes = r.u64();
  s.epoch = r.u64();
  r.expect_done();
  return s;
}

Bytes encode_merge_stats(const MergeStats& s) {
  cdf::Writer w;
  w.u64(s.applied);
  w.u64(s.duplicates);
  w.u64(s.stale);
  w.u64(s.deferred);
  w.str(s.error);
  return w.take();
}

MergeStats decode_merge_stats(std::span<const std::uint8_t> in) {
  cdf::Reader r(in);
  MergeStats s;
  s.applied = r.u64();
  s.duplicates = r.u64();
  s.stale = r.u64();
  s.deferred = r.u64();
  s.error = r.str();
  r.expect_done();
  return s;
}

}  // namespace polyrdl::plugin
