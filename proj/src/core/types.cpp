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

#include "polyrdl/core/types.hpp"

#include <bit>
#include <cmath>

#include "polyrdl/core/error.hpp"

namespace polyrdl {

bool valid_replica_id(std::string_view id) {
  return !id.empty() && id.size() <= kMaxReplicaIdLen && valid_utf8(id);
}

bool valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  const auto* end = p + s.size();
  while (p < end) {
    unsigned char c = *p;
    if (c < 0x80) {
      ++p;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (static_cast<std::size_t>(end - p) < len) return false;
    for (std::size_t i = 1; i < len; ++i) {
      if ((p[i] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (p[i] & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    p += len;
  }
  return true;
}

std::string to_string(const UpdateId& id) { return id.replica_id + ":" + std::to_string(id.seq); }

bool valid_object_type(std::uint8_t t) { return t >= 1 && t <= 3; }

std::string_view to_string(ObjectType t) {
  switch (t) {
    case ObjectType::kCounter:
      return "counter";
    case ObjectType::kSet:
      return "set";
    case ObjectType::kMap:
      return "map";
  }
  return "?";
}

ScalarTag scalar_tag(const Scalar& s) {
  static constexpr ScalarTag kTags[] = {ScalarTag::kInt, ScalarTag::kFloat, ScalarTag::kBool, ScalarTag::kString,
                                        ScalarTag::kBytes};
  return kTags[s.index()];
}

bool scalar_equal(const Scalar& a, const Scalar& b) {
  if (a.index() != b.index()) return false;
  if (const auto* fa = std::get_if<double>(&a)) {
    return std::bit_cast<std::uint64_t>(*fa) == std::bit_cast<std::uint64_t>(std::get<double>(b));
  }
  return a == b;
}

Scalar make_float(double v) {
  if (!std::isfinite(v)) throw Error(Errc::kInvalidArgument, "float scalar must be finite");
  return Scalar{v};
}

OpKind op_kind(const OpPayload& op) {
  static constexpr OpKind kKinds[] = {OpKind::kCounterAdd,   OpKind::kSetAdd,    OpKind::kSetRemove,
                                      OpKind::kMapPut,       OpKind::kMapRemoveKey, OpKind::kMapCounterAdd,
                                      OpKind::kMapSetAdd,    OpKind::kMapSetRemove, OpKind::kReset};
  return kKinds[op.index()];
}

std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::kCounterAdd:
      return "CounterAdd";
    case OpKind::kSetAdd:
      return "SetAdd";
    case OpKind::kSetRemove:
      return "SetRemove";
    case OpKind::kMapPut:
      return "MapPut";
    case OpKind::kMapRemoveKey:
      return "MapRemoveKey";
    case OpKind::kMapCounterAdd:
      return "MapCounterAdd";
    case OpKind::kMapSetAdd:
      return "MapSetAdd";
    case OpKind::kMapSetRemove:
      return "MapSetRemove";
    case OpKind::kReset:
      return "Reset";
  }
  return "?";
}

bool op_legal_for(ObjectType type, OpKind kind) {
  switch (kind) {
    case OpKind::kReset:
      return true;
    case OpKind::kCounterAdd:
      return type == ObjectType::kCounter;
    case OpKind::kSetAdd:
    case OpKind::kSetRemove:
      return type == ObjectType::kSet;
    default:
      return type == ObjectType::kMap;
  }
}

namespace {

bool finite_scalar(const Scalar& s) {
  const auto* f = std::get_if<double>(&s);
  return f == nullptr || std::isfinite(*f);
}

bool utf8_scalar(const Scalar& s) {
  const auto* str = std::get_if<std::string>(&s);
  return str == nullptr || valid_utf8(*str);
}

bool valid_tags(const std::vector<UpdateId>& tags) {
  for (const auto& t : tags) {
    if (!valid_replica_id(t.replica_id) || t.seq == 0) return false;
  }
  return true;
}

}  // namespace

std::string validate_update(const Update& u) {
  if (!valid_replica_id(u.id.replica_id)) return "replica_id must be nonempty UTF-8 of at most 64 bytes";
  if (u.id.seq == 0) return "seq starts at 1";
  if (u.lamport == 0) return "lamport must be positive";
  if (!valid_utf8(u.object_id)) return "object_id is not UTF-8";
  if (!valid_object_type(static_cast<std::uint8_t>(u.object_type))) return "unknown object type";
  const OpKind kind = op_kind(u.op);
  if (!op_legal_for(u.object_type, kind)) {
    return std::string(to_string(kind)) + " is not legal for a " + std::string(to_string(u.object_type));
  }
  return std::visit(
      [&](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::SetRemove>) {
          if (!valid_tags(o.observed_tags)) return "invalid observed tag";
        } else if constexpr (std::is_same_v<T, op::MapSetRemove>) {
          if (!valid_utf8(o.key)) return "key is not UTF-8";
          if (!valid_tags(o.observed_tags)) return "invalid observed tag";
        } else if constexpr (std::is_same_v<T, op::MapPut>) {
          if (!valid_utf8(o.key)) return "key is not UTF-8";
          if (!finite_scalar(o.value)) return "float scalar must be finite";
          if (!utf8_scalar(o.value)) return "string scalar is not UTF-8";
        } else if constexpr (std::is_same_v<T, op::MapRemoveKey> || std::is_same_v<T, op::MapCounterAdd> ||
                             std::is_same_v<T, op::MapSetAdd>) {
          if (!valid_utf8(o.key)) return "key is not UTF-8";
        } else if constexpr (std::is_same_v<T, op::Reset>) {
          if (o.new_epoch == 0) return "Reset.new_epoch must be positive";
          if (o.new_epoch != u.epoch) return "Reset must carry its new epoch as the update epoch";
        }
        return {};
      },
      u.op);
}

std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case Errc::kTypeMismatch:
      return "TYPE_MISMATCH";
    case Errc::kMalformedUpdate:
      return "MALFORMED_UPDATE";
    case Errc::kDuplicateReplica:
      return "DUPLICATE_REPLICA";
    case Errc::kResetNotAllowed:
      return "RESET_NOT_ALLOWED";
    case Errc::kIo:
      return "IO_ERROR";
    case Errc::kCorruption:
      return "CORRUPTION";
    case Errc::kUnrecoverable:
      return "UNRECOVERABLE";
    case Errc::kDuplicateLabel:
      return "DUPLICATE_LABEL";
    case Errc::kUnknownCheckpoint:
      return "UNKNOWN_CHECKPOINT";
    case Errc::kHalted:
      return "HALTED";
  }
  return "?";
}

}  // namespace polyrdl
