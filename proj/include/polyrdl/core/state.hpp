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

#ifndef POLYRDL_CORE_STATE_HPP_
#define POLYRDL_CORE_STATE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "polyrdl/core/types.hpp"

namespace polyrdl::core {

// Every record inside a typed slot (top-level object or map entry) carries
// the stamp of the op that produced it. A slot keeps an optional `floor`:
// records at or below it are gone and later arrivals at or below it are
// ignored. Floors come from map key removals and from losing a type
// conflict; together they make apply order irrelevant without causal
// delivery.

struct Contribution {
  std::int64_t delta = 0;
  std::uint64_t lamport = 0;
  friend bool operator==(const Contribution&, const Contribution&) = default;
};

struct CounterState {
  // Read freely; change only through add and prune, which keep the sum.
  std::map<UpdateId, Contribution> contributions;

  std::int64_t value() const { return static_cast<std::int64_t>(sum_); }
  void add(const UpdateId& id, std::uint64_t lamport, std::int64_t delta);
  void prune(const LamportStamp& floor);

 private:
  std::uint64_t sum_ = 0;  // wraps instead of overflowing
};

/// Add-wins observed-remove set.
struct SetState {
  // element -> (add tag -> lamport of the add)
  std::map<Bytes, std::map<UpdateId, std::uint64_t>> live;
  // removed tag -> greatest stamp of a remove naming it
  std::map<UpdateId, LamportStamp> removed;

  std::vector<Bytes> elements() const;
  bool contains(const Bytes& element) const { return live.contains(element); }
  void add(const UpdateId& tag, std::uint64_t lamport, const Bytes& element);
  void remove(std::span<const UpdateId> tags, const LamportStamp& stamp);
  void prune(const LamportStamp& floor);
  /// Rebuilds the tag -> element index after direct edits of `live`.
  void reindex();

 private:
  std::map<UpdateId, Bytes> tag_index_;
};

enum class EntryKind : std::uint8_t { kNone = 0, kCounter = 1, kSet = 2, kRegister = 4 };

struct MapEntry {
  std::variant<std::monostate, CounterState, SetState, Scalar> value;
  LamportStamp type_stamp;  // meaningful only when kind() != kNone
  std::optional<LamportStamp> floor;

  EntryKind kind() const;
  /// Drops everything at or below `floor` coming from the enclosing object.
  void prune_outer(const LamportStamp& floor);
  bool empty() const { return kind() == EntryKind::kNone && !floor; }
};

struct MapState {
  std::map<std::string, MapEntry> entries;

  void prune(const LamportStamp& floor);
};

struct Object {
  std::variant<CounterState, SetState, MapState> value;
  LamportStamp type_stamp;
  std::optional<LamportStamp> floor;

  ObjectType type() const { return static_cast<ObjectType>(value.index() + 1); }
};

using ObjectStore = std::map<std::string, Object>;

/// Applies a non-Reset update's effect to the store. Does not dedup.
void apply_op(ObjectStore& store, const Update& u);

EntryKind entry_kind_for(OpKind k);

}  // namespace polyrdl::core

#endif  // POLYRDL_CORE_STATE_HPP_
