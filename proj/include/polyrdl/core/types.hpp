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

#ifndef POLYRDL_CORE_TYPES_HPP_
#define POLYRDL_CORE_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace polyrdl {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

constexpr std::size_t kMaxReplicaIdLen = 64;

/// Nonempty and at most 64 bytes.
bool valid_replica_id(std::string_view id);
bool valid_utf8(std::string_view s);

/// Total order over updates: (lamport, replica_id), replica ids compared
/// bytewise.
struct LamportStamp {
  std::uint64_t lamport = 0;
  std::string replica_id;

  friend bool operator==(const LamportStamp&, const LamportStamp&) = default;
  friend std::strong_ordering operator<=>(const LamportStamp& a, const LamportStamp& b) {
    if (auto c = a.lamport <=> b.lamport; c != 0) return c;
    return a.replica_id.compare(b.replica_id) <=> 0;
  }
};

struct UpdateId {
  std::string replica_id;
  std::uint64_t seq = 0;

  friend bool operator==(const UpdateId&, const UpdateId&) = default;
  friend std::strong_ordering operator<=>(const UpdateId& a, const UpdateId& b) {
    if (auto c = a.replica_id.compare(b.replica_id) <=> 0; c != 0) return c;
    return a.seq <=> b.seq;
  }
};

std::string to_string(const UpdateId& id);  // "A:3"

enum class ObjectType : std::uint8_t { kCounter = 1, kSet = 2, kMap = 3 };

bool valid_object_type(std::uint8_t t);
std::string_view to_string(ObjectType t);

/// Map register payload. Floats must be finite.
using Scalar = std::variant<std::int64_t, double, bool, std::string, Bytes>;

enum class ScalarTag : std::uint8_t { kInt = 0x01, kFloat = 0x02, kBool = 0x03, kString = 0x04, kBytes = 0x05 };

ScalarTag scalar_tag(const Scalar& s);
bool scalar_equal(const Scalar& a, const Scalar& b);

/// Throws Error{kInvalidArgument} for NaN or infinite floats.
Scalar make_float(double v);

namespace op {

struct CounterAdd {
  std::int64_t delta = 0;
  friend bool operator==(const CounterAdd&, const CounterAdd&) = default;
};
struct SetAdd {
  Bytes element;
  friend bool operator==(const SetAdd&, const SetAdd&) = default;
};
struct SetRemove {
  Bytes element;
  std::vector<UpdateId> observed_tags;
  friend bool operator==(const SetRemove&, const SetRemove&) = default;
};
struct MapPut {
  std::string key;
  Scalar value;
  friend bool operator==(const MapPut& a, const MapPut& b) {
    return a.key == b.key && scalar_equal(a.value, b.value);
  }
};
struct MapRemoveKey {
  std::string key;
  friend bool operator==(const MapRemoveKey&, const MapRemoveKey&) = default;
};
struct MapCounterAdd {
  std::string key;
  std::int64_t delta = 0;
  friend bool operator==(const MapCounterAdd&, const MapCounterAdd&) = default;
};
struct MapSetAdd {
  std::string key;
  Bytes element;
  friend bool operator==(const MapSetAdd&, const MapSetAdd&) = default;
};
struct MapSetRemove {
  std::string key;
  Bytes element;
  std::vector<UpdateId> observed_tags;
  friend bool operator==(const MapSetRemove&, const MapSetRemove&) = default;
};
/// Replaces the whole object store with `snapshot` (a canonical state
/// encoding) and moves the replica to `new_epoch`.
struct Reset {
  std::uint64_t new_epoch = 0;
  Bytes snapshot;
  friend bool operator==(const Reset&, const Reset&) = default;
};

}  // namespace op

using OpPayload = std::variant<op::CounterAdd, op::SetAdd, op::SetRemove, op::MapPut, op::MapRemoveKey,
                               op::MapCounterAdd, op::MapSetAdd, op::MapSetRemove, op::Reset>;

enum class OpKind : std::uint8_t {
  kCounterAdd = 0x01,
  kSetAdd = 0x03,
  kSetRemove = 0x04,
  kMapPut = 0x05,
  kMapRemoveKey = 0x06,
  kMapCounterAdd = 0x07,
  kMapSetAdd = 0x08,
  kMapSetRemove = 0x09,
  kReset = 0x0F,
};

OpKind op_kind(const OpPayload& op);
std::string_view to_string(OpKind k);

/// Reset is accepted under any object type; every other kind belongs to
/// exactly one type.
bool op_legal_for(ObjectType type, OpKind kind);

struct Update {
  UpdateId id;
  std::uint64_t lamport = 0;
  std::uint64_t epoch = 0;
  std::string object_id;
  ObjectType object_type = ObjectType::kCounter;
  OpPayload op;

  LamportStamp stamp() const { return {lamport, id.replica_id}; }
  bool is_reset() const { return std::holds_alternative<op::Reset>(op); }

  friend bool operator==(const Update&, const Update&) = default;
};

/// Structural checks shared by the decoder and apply path. Returns an empty
/// string when `u` is well formed, otherwise a diagnostic.
std::string validate_update(const Update& u);

}  // namespace polyrdl

#endif  // POLYRDL_CORE_TYPES_HPP_
