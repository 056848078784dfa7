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

#include "polyrdl/core/state.hpp"

#include <cassert>

namespace polyrdl::core {

namespace {

LamportStamp stamp_of(const UpdateId& id, std::uint64_t lamport) { return {lamport, id.replica_id}; }

void raise(std::optional<LamportStamp>& floor, const LamportStamp& s) {
  if (!floor || *floor < s) floor = s;
}

}  // namespace

void CounterState::add(const UpdateId& id, std::uint64_t lamport, std::int64_t delta) {
  if (contributions.try_emplace(id, Contribution{delta, lamport}).second) sum_ += static_cast<std::uint64_t>(delta);
}

void CounterState::prune(const LamportStamp& floor) {
  std::erase_if(contributions, [&](const auto& kv) {
    if (stamp_of(kv.first, kv.second.lamport) > floor) return false;
    sum_ -= static_cast<std::uint64_t>(kv.second.delta);
    return true;
  });
}

std::vector<Bytes> SetState::elements() const {
  std::vector<Bytes> out;
  out.reserve(live.size());
  for (const auto& [e, tags] : live) out.push_back(e);
  return out;
}

void SetState::add(const UpdateId& tag, std::uint64_t lamport, const Bytes& element) {
  if (removed.contains(tag) || tag_index_.contains(tag)) return;
  live[element].emplace(tag, lamport);
  tag_index_.emplace(tag, element);
}

void SetState::remove(std::span<const UpdateId> tags, const LamportStamp& stamp) {
  for (const auto& tag : tags) {
    if (auto it = tag_index_.find(tag); it != tag_index_.end()) {
      auto elem = live.find(it->second);
      elem->second.erase(tag);
      if (elem->second.empty()) live.erase(elem);
      tag_index_.erase(it);
    }
    auto [rit, inserted] = removed.try_emplace(tag, stamp);
    if (!inserted && rit->second < stamp) rit->second = stamp;
  }
}

void SetState::prune(const LamportStamp& floor) {
  for (auto it = live.begin(); it != live.end();) {
    std::erase_if(it->second, [&](const auto& kv) {
      if (stamp_of(kv.first, kv.second) > floor) return false;
      tag_index_.erase(kv.first);
      return true;
    });
    it = it->second.empty() ? live.erase(it) : std::next(it);
  }
  std::erase_if(removed, [&](const auto& kv) { return kv.second <= floor; });
}

void SetState::reindex() {
  tag_index_.clear();
  for (const auto& [e, tags] : live) {
    for (const auto& [tag, lamport] : tags) tag_index_.emplace(tag, e);
  }
}

EntryKind MapEntry::kind() const {
  switch (value.index()) {
    case 1:
      return EntryKind::kCounter;
    case 2:
      return EntryKind::kSet;
    case 3:
      return EntryKind::kRegister;
    default:
      return EntryKind::kNone;
  }
}

void MapEntry::prune_outer(const LamportStamp& f) {
  if (floor && *floor <= f) floor.reset();
  if (kind() == EntryKind::kNone) return;
  if (type_stamp <= f) {
    value = std::monostate{};
    return;
  }
  if (auto* c = std::get_if<CounterState>(&value)) c->prune(f);
  if (auto* s = std::get_if<SetState>(&value)) s->prune(f);
  // a register's stamp is its type stamp, already above f
}

void MapState::prune(const LamportStamp& floor) {
  for (auto it = entries.begin(); it != entries.end();) {
    it->second.prune_outer(floor);
    it = it->second.empty() ? entries.erase(it) : std::next(it);
  }
}

EntryKind entry_kind_for(OpKind k) {
  switch (k) {
    case OpKind::kMapPut:
      return EntryKind::kRegister;
    case OpKind::kMapCounterAdd:
      return EntryKind::kCounter;
    case OpKind::kMapSetAdd:
    case OpKind::kMapSetRemove:
      return EntryKind::kSet;
    default:
      return EntryKind::kNone;
  }
}

namespace {

// Slot admission shared by objects and map entries. Returns true when the op
// should take effect on the slot's value; otherwise the slot may have raised
// its floor and dropped records.

template <class Variant>
void reset_object_value(Variant& v, ObjectType t) {
  switch (t) {
    case ObjectType::kCounter:
      v.template emplace<CounterState>();
      break;
    case ObjectType::kSet:
      v.template emplace<SetState>();
      break;
    case ObjectType::kMap:
      v.template emplace<MapState>();
      break;
  }
}

void prune_object_value(Object& o) {
  std::visit([&](auto& s) { s.prune(*o.floor); }, o.value);
}

bool admit(Object& o, ObjectType t, const LamportStamp& s) {
  if (o.floor && s <= *o.floor) return false;
  if (o.type() == t) {
    if (o.type_stamp < s) o.type_stamp = s;
    return true;
  }
  if (o.type_stamp < s) {
    raise(o.floor, o.type_stamp);
    reset_object_value(o.value, t);
    o.type_stamp = s;
    return true;
  }
  raise(o.floor, s);
  prune_object_value(o);
  return false;
}

void reset_entry_value(MapEntry& e, EntryKind k) {
  switch (k) {
    case EntryKind::kCounter:
      e.value.emplace<CounterState>();
      break;
    case EntryKind::kSet:
      e.value.emplace<SetState>();
      break;
    case EntryKind::kRegister:
      e.value.emplace<Scalar>();
      break;
    case EntryKind::kNone:
      e.value.emplace<std::monostate>();
      break;
  }
}

void prune_entry_value(MapEntry& e) {
  if (auto* c = std::get_if<CounterState>(&e.value)) c->prune(*e.floor);
  if (auto* st = std::get_if<SetState>(&e.value)) st->prune(*e.floor);
}

bool admit(MapEntry& e, EntryKind k, const LamportStamp& s) {
  if (e.floor && s <= *e.floor) return false;
  if (e.kind() == EntryKind::kNone) {
    reset_entry_value(e, k);
    e.type_stamp = s;
    return true;
  }
  if (e.kind() == k) {
    if (e.type_stamp < s) e.type_stamp = s;
    return true;
  }
  if (e.type_stamp < s) {
    raise(e.floor, e.type_stamp);
    reset_entry_value(e, k);
    e.type_stamp = s;
    return true;
  }
  raise(e.floor, s);
  prune_entry_value(e);
  return false;
}

void remove_key(MapState& m, const std::string& key, const LamportStamp& s) {
  MapEntry& e = m.entries[key];
  if (e.floor && s <= *e.floor) return;
  e.floor = s;
  if (e.kind() == EntryKind::kNone) return;
  if (e.type_stamp < s) {
    e.value = std::monostate{};
  } else {
    prune_entry_value(e);
  }
}

void apply_map(MapState& m, const Update& u, const LamportStamp& s) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::MapRemoveKey>) {
          remove_key(m, o.key, s);
        } else if constexpr (std::is_same_v<T, op::MapPut> || std::is_same_v<T, op::MapCounterAdd> ||
                             std::is_same_v<T, op::MapSetAdd> || std::is_same_v<T, op::MapSetRemove>) {
          auto [it, created] = m.entries.try_emplace(o.key);
          MapEntry& e = it->second;
          if (!admit(e, entry_kind_for(op_kind(u.op)), s)) {
            if (e.empty()) m.entries.erase(it);
            return;
          }
          if constexpr (std::is_same_v<T, op::MapPut>) {
            if (e.type_stamp == s) std::get<Scalar>(e.value) = o.value;
          } else if constexpr (std::is_same_v<T, op::MapCounterAdd>) {
            std::get<CounterState>(e.value).add(u.id, u.lamport, o.delta);
          } else if constexpr (std::is_same_v<T, op::MapSetAdd>) {
            std::get<SetState>(e.value).add(u.id, u.lamport, o.element);
          } else {
            std::get<SetState>(e.value).remove(o.observed_tags, s);
          }
        }
      },
      u.op);
}

}  // namespace

void apply_op(ObjectStore& store, const Update& u) {
  assert(!u.is_reset());
  const LamportStamp s = u.stamp();
  auto it = store.find(u.object_id);
  if (it == store.end()) {
    Object o;
    reset_object_value(o.value, u.object_type);
    o.type_stamp = s;
    it = store.emplace(u.object_id, std::move(o)).first;
  } else if (!admit(it->second, u.object_type, s)) {
    return;
  }
  Object& o = it->second;
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, op::CounterAdd>) {
          std::get<CounterState>(o.value).add(u.id, u.lamport, op.delta);
        } else if constexpr (std::is_same_v<T, op::SetAdd>) {
          std::get<SetState>(o.value).add(u.id, u.lamport, op.element);
        } else if constexpr (std::is_same_v<T, op::SetRemove>) {
          std::get<SetState>(o.value).remove(op.observed_tags, s);
        } else if constexpr (!std::is_same_v<T, op::Reset>) {
          apply_map(std::get<MapState>(o.value), u, s);
        }
      },
      u.op);
}

}  // namespace polyrdl::core
