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

#include "polyrdl/cdf/codec.hpp"

#include <set>

namespace polyrdl::cdf {

namespace {

// Smallest possible encodings, used to bound list counts before reading.
constexpr std::size_t kMinTag = 4 + 8;
constexpr std::size_t kMinUpdate = 4 + 8 + 8 + 8 + 4 + 1 + 1;

[[noreturn]] void malformed(const std::string& what) { throw DecodeError(DecodeErrc::kMalformed, what); }

void encode_tags(Writer& w, const std::vector<UpdateId>& tags) {
  w.count(tags.size());
  for (const auto& t : tags) {
    w.str(t.replica_id);
    w.u64(t.seq);
  }
}

std::vector<UpdateId> decode_tags(Reader& r) {
  std::vector<UpdateId> tags(r.count(kMinTag));
  for (auto& t : tags) {
    t.replica_id = r.str();
    t.seq = r.u64();
  }
  return tags;
}

}  // namespace

void encode_scalar(Writer& w, const Scalar& s) {
  w.u8(static_cast<std::uint8_t>(scalar_tag(s)));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          w.i64(v);
        } else if constexpr (std::is_same_v<T, double>) {
          w.f64(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          w.boolean(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          w.str(v);
        } else {
          w.bytes(v);
        }
      },
      s);
}

Scalar decode_scalar(Reader& r) {
  switch (r.u8()) {
    case static_cast<std::uint8_t>(ScalarTag::kInt):
      return r.i64();
    case static_cast<std::uint8_t>(ScalarTag::kFloat):
      return r.f64();
    case static_cast<std::uint8_t>(ScalarTag::kBool):
      return r.boolean();
    case static_cast<std::uint8_t>(ScalarTag::kString):
      return r.str();
    case static_cast<std::uint8_t>(ScalarTag::kBytes):
      return r.bytes();
    default:
      throw DecodeError(DecodeErrc::kUnknownTag, "unknown scalar tag");
  }
}

void encode_update(Writer& w, const Update& u) {
  w.str(u.id.replica_id);
  w.u64(u.id.seq);
  w.u64(u.lamport);
  w.u64(u.epoch);
  w.str(u.object_id);
  w.u8(static_cast<std::uint8_t>(u.object_type));
  encode_op(w, u.op);
}

void encode_op(Writer& w, const OpPayload& payload) {
  w.u8(static_cast<std::uint8_t>(op_kind(payload)));
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::CounterAdd>) {
          w.i64(o.delta);
        } else if constexpr (std::is_same_v<T, op::SetAdd>) {
          w.bytes(o.element);
        } else if constexpr (std::is_same_v<T, op::SetRemove>) {
          w.bytes(o.element);
          encode_tags(w, o.observed_tags);
        } else if constexpr (std::is_same_v<T, op::MapPut>) {
          w.str(o.key);
          encode_scalar(w, o.value);
        } else if constexpr (std::is_same_v<T, op::MapRemoveKey>) {
          w.str(o.key);
        } else if constexpr (std::is_same_v<T, op::MapCounterAdd>) {
          w.str(o.key);
          w.i64(o.delta);
        } else if constexpr (std::is_same_v<T, op::MapSetAdd>) {
          w.str(o.key);
          w.bytes(o.element);
        } else if constexpr (std::is_same_v<T, op::MapSetRemove>) {
          w.str(o.key);
          w.bytes(o.element);
          encode_tags(w, o.observed_tags);
        } else {
          w.u64(o.new_epoch);
          w.bytes(o.snapshot);
        }
      },
      payload);
}

Bytes encode_update(const Update& u) {
  Writer w;
  encode_update(w, u);
  return w.take();
}

OpPayload decode_op(Reader& r) {
  OpPayload out;
  switch (r.u8()) {
    case 0x01:
      out = op::CounterAdd{r.i64()};
      break;
    case 0x03:
      out = op::SetAdd{r.bytes()};
      break;
    case 0x04: {
      op::SetRemove o;
      o.element = r.bytes();
      o.observed_tags = decode_tags(r);
      out = std::move(o);
      break;
    }
    case 0x05: {
      op::MapPut o;
      o.key = r.str();
      o.value = decode_scalar(r);
      out = std::move(o);
      break;
    }
    case 0x06:
      out = op::MapRemoveKey{r.str()};
      break;
    case 0x07: {
      op::MapCounterAdd o;
      o.key = r.str();
      o.delta = r.i64();
      out = std::move(o);
      break;
    }
    case 0x08: {
      op::MapSetAdd o;
      o.key = r.str();
      o.element = r.bytes();
      out = std::move(o);
      break;
    }
    case 0x09: {
      op::MapSetRemove o;
      o.key = r.str();
      o.element = r.bytes();
      o.observed_tags = decode_tags(r);
      out = std::move(o);
      break;
    }
    case 0x0F: {
      op::Reset o;
      o.new_epoch = r.u64();
      o.snapshot = r.bytes();
      out = std::move(o);
      break;
    }
    default:
      throw DecodeError(DecodeErrc::kUnknownTag, "unknown op kind");
  }
  return out;
}

Update decode_update(Reader& r) {
  Update u;
  u.id.replica_id = r.str();
  u.id.seq = r.u64();
  u.lamport = r.u64();
  u.epoch = r.u64();
  u.object_id = r.str();
  const std::uint8_t type = r.u8();
  if (!valid_object_type(type)) throw DecodeError(DecodeErrc::kUnknownTag, "unknown object type");
  u.object_type = static_cast<ObjectType>(type);
  u.op = decode_op(r);
  if (auto diag = validate_update(u); !diag.empty()) malformed(diag);
  if (const auto* reset = std::get_if<op::Reset>(&u.op)) decode_state(reset->snapshot);
  return u;
}

Update decode_update(std::span<const std::uint8_t> in) {
  Reader r(in);
  Update u = decode_update(r);
  r.expect_done();
  return u;
}

Bytes encode_sync(const SyncMessage& m) {
  Writer w;
  w.str(m.sender);
  w.u64(m.sender_epoch);
  w.count(m.version_vector.size());
  for (const auto& [id, seq] : m.version_vector) {
    w.str(id);
    w.u64(seq);
  }
  w.count(m.updates.size());
  for (const auto& u : m.updates) encode_update(w, u);
  return w.take();
}

SyncMessage decode_sync(std::span<const std::uint8_t> in) {
  Reader r(in);
  SyncMessage m;
  m.sender = r.str();
  if (!valid_replica_id(m.sender)) throw DecodeError(DecodeErrc::kMalformedSync, "invalid sender id");
  m.sender_epoch = r.u64();
  m.version_vector.resize(r.count(kMinTag));
  for (std::size_t i = 0; i < m.version_vector.size(); ++i) {
    auto& [id, seq] = m.version_vector[i];
    id = r.str();
    seq = r.u64();
    if (i > 0 && !(m.version_vector[i - 1].first < id)) {
      throw DecodeError(DecodeErrc::kMalformedSync, "version vector not strictly sorted");
    }
  }
  const std::size_t n = r.count(kMinUpdate);
  m.updates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.updates.push_back(decode_update(r));
    if (i > 0 && !(m.updates[i - 1].id < m.updates[i].id)) {
      throw DecodeError(DecodeErrc::kMalformedSync, "updates not strictly sorted by (replica_id, seq)");
    }
  }
  r.expect_done();
  return m;
}

Bytes encode_hello(const PluginHello& h) {
  Writer w;
  w.str(h.plugin_id);
  w.u32(h.schema_version);
  return w.take();
}

PluginHello decode_hello(std::span<const std::uint8_t> in) {
  Reader r(in);
  PluginHello h;
  h.plugin_id = r.str();
  h.schema_version = r.u32();
  r.expect_done();
  return h;
}

Bytes encode_event(const PluginEvent& e) {
  Writer w;
  w.u64(e.event_seq);
  w.u64(e.reply_to);
  w.str(e.core_function);
  w.str(e.replica_id);
  w.boolean(e.update.has_value());
  if (e.update) encode_update(w, *e.update);
  w.bytes(e.result_view);
  return w.take();
}

PluginEvent decode_event(std::span<const std::uint8_t> in) {
  Reader r(in);
  PluginEvent e;
  e.event_seq = r.u64();
  e.reply_to = r.u64();
  e.core_function = r.str();
  e.replica_id = r.str();
  if (r.boolean()) e.update = decode_update(r);
  e.result_view = r.bytes();
  r.expect_done();
  return e;
}

Bytes encode_command(const PluginCommand& c) {
  Writer w;
  w.u64(c.cmd_seq);
  w.str(c.core_function);
  w.bytes(c.args);
  return w.take();
}

PluginCommand decode_command(std::span<const std::uint8_t> in) {
  Reader r(in);
  PluginCommand c;
  c.cmd_seq = r.u64();
  c.core_function = r.str();
  c.args = r.bytes();
  r.expect_done();
  return c;
}

Bytes encode_error(const PluginError& e) {
  Writer w;
  w.u64(e.ref_seq);
  w.u16(e.code);
  w.str(e.message);
  return w.take();
}

PluginError decode_error(std::span<const std::uint8_t> in) {
  Reader r(in);
  PluginError e;
  e.ref_seq = r.u64();
  e.code = r.u16();
  e.message = r.str();
  r.expect_done();
  return e;
}

// ---------------------------------------------------------------------------
// Canonical state encoding
//
//   state    := count, object*            (sorted by object_id)
//   object   := str id, u8 type, stamp type_stamp, opt_stamp floor, body
//   stamp    := u64 lamport, str replica_id
//   opt_stamp:= u8 0 | u8 1 stamp
//   counter  := count, (str rid, u64 seq, u64 lamport, i64 delta)*
//   set      := count, (bytes elem, count, (str rid, u64 seq, u64 lamport)*)*,
//               count, (str rid, u64 seq, stamp remove_stamp)*
//   map      := count, entry*                (sorted by key)
//   entry    := str key, u8 kind, [stamp type_stamp if kind != 0],
//               opt_stamp floor, counter | set | scalar | (nothing)

void encode_stamp(Writer& w, const LamportStamp& s) {
  w.u64(s.lamport);
  w.str(s.replica_id);
}

LamportStamp decode_stamp(Reader& r) {
  LamportStamp s;
  s.lamport = r.u64();
  s.replica_id = r.str();
  return s;
}

namespace {

void encode_opt_stamp(Writer& w, const std::optional<LamportStamp>& s) {
  w.boolean(s.has_value());
  if (s) encode_stamp(w, *s);
}

std::optional<LamportStamp> decode_opt_stamp(Reader& r) {
  if (!r.boolean()) return std::nullopt;
  return decode_stamp(r);
}

void encode_counter(Writer& w, const core::CounterState& c) {
  w.count(c.contributions.size());
  for (const auto& [id, contrib] : c.contributions) {
    w.str(id.replica_id);
    w.u64(id.seq);
    w.u64(contrib.lamport);
    w.i64(contrib.delta);
  }
}

void encode_set(Writer& w, const core::SetState& s) {
  w.count(s.live.size());
  for (const auto& [elem, tags] : s.live) {
    w.bytes(elem);
    w.count(tags.size());
    for (const auto& [tag, lamport] : tags) {
      w.str(tag.replica_id);
      w.u64(tag.seq);
      w.u64(lamport);
    }
  }
  w.count(s.removed.size());
  for (const auto& [tag, stamp] : s.removed) {
    w.str(tag.replica_id);
    w.u64(tag.seq);
    encode_stamp(w, stamp);
  }
}

bool above(const LamportStamp& s, const std::optional<LamportStamp>& floor) { return !floor || *floor < s; }

const std::optional<LamportStamp>& higher(const std::optional<LamportStamp>& a,
                                          const std::optional<LamportStamp>& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? b : a;
}

UpdateId decode_id(Reader& r) {
  UpdateId id;
  id.replica_id = r.str();
  id.seq = r.u64();
  if (!valid_replica_id(id.replica_id) || id.seq == 0) malformed("invalid update id in state");
  return id;
}

core::CounterState decode_counter(Reader& r, const std::optional<LamportStamp>& floor) {
  core::CounterState c;
  const std::size_t n = r.count(kMinTag + 16);
  for (std::size_t i = 0; i < n; ++i) {
    UpdateId id = decode_id(r);
    core::Contribution contrib;
    contrib.lamport = r.u64();
    contrib.delta = r.i64();
    if (!c.contributions.empty() && !(c.contributions.rbegin()->first < id)) malformed("contributions not sorted");
    if (!above({contrib.lamport, id.replica_id}, floor)) malformed("contribution at or below floor");
    c.add(id, contrib.lamport, contrib.delta);
  }
  return c;
}

core::SetState decode_set(Reader& r, const std::optional<LamportStamp>& floor) {
  core::SetState s;
  std::set<UpdateId> seen;
  const std::size_t n = r.count(8);
  for (std::size_t i = 0; i < n; ++i) {
    Bytes elem = r.bytes();
    if (!s.live.empty() && !(s.live.rbegin()->first < elem)) malformed("set elements not sorted");
    const std::size_t m = r.count(kMinTag + 8);
    if (m == 0) malformed("live element without tags");
    std::map<UpdateId, std::uint64_t> tags;
    for (std::size_t j = 0; j < m; ++j) {
      UpdateId tag = decode_id(r);
      std::uint64_t lamport = r.u64();
      if (!tags.empty() && !(tags.rbegin()->first < tag)) malformed("tags not sorted");
      if (!above({lamport, tag.replica_id}, floor)) malformed("tag at or below floor");
      if (!seen.insert(tag).second) malformed("tag under two elements");
      tags.emplace_hint(tags.end(), std::move(tag), lamport);
    }
    s.live.emplace_hint(s.live.end(), std::move(elem), std::move(tags));
  }
  const std::size_t removed = r.count(kMinTag + 12);
  for (std::size_t i = 0; i < removed; ++i) {
    UpdateId tag = decode_id(r);
    LamportStamp stamp = decode_stamp(r);
    if (!s.removed.empty() && !(s.removed.rbegin()->first < tag)) malformed("removed tags not sorted");
    if (!above(stamp, floor)) malformed("removal at or below floor");
    if (seen.contains(tag)) malformed("tag both live and removed");
    s.removed.emplace_hint(s.removed.end(), std::move(tag), std::move(stamp));
  }
  s.reindex();
  return s;
}

void encode_map(Writer& w, const core::MapState& m) {
  w.count(m.entries.size());
  for (const auto& [key, e] : m.entries) {
    w.str(key);
    w.u8(static_cast<std::uint8_t>(e.kind()));
    if (e.kind() != core::EntryKind::kNone) encode_stamp(w, e.type_stamp);
    encode_opt_stamp(w, e.floor);
    if (const auto* c = std::get_if<core::CounterState>(&e.value)) encode_counter(w, *c);
    if (const auto* s = std::get_if<core::SetState>(&e.value)) encode_set(w, *s);
    if (const auto* reg = std::get_if<Scalar>(&e.value)) encode_scalar(w, *reg);
  }
}

core::MapState decode_map(Reader& r, const std::optional<LamportStamp>& object_floor) {
  core::MapState m;
  const std::size_t n = r.count(6);
  for (std::size_t i = 0; i < n; ++i) {
    std::string key = r.str();
    if (!m.entries.empty() && !(m.entries.rbegin()->first < key)) malformed("map keys not sorted");
    core::MapEntry e;
    const std::uint8_t kind = r.u8();
    if (kind != 0 && kind != 1 && kind != 2 && kind != 4) throw DecodeError(DecodeErrc::kUnknownTag, "entry kind");
    if (kind != 0) e.type_stamp = decode_stamp(r);
    e.floor = decode_opt_stamp(r);
    if (e.floor && !above(*e.floor, object_floor)) malformed("entry floor at or below object floor");
    const auto& floor = higher(e.floor, object_floor);
    if (kind != 0 && !above(e.type_stamp, floor)) malformed("entry type stamp at or below floor");
    switch (kind) {
      case 0:
        if (!e.floor) malformed("empty map entry");
        break;
      case 1:
        e.value = decode_counter(r, floor);
        break;
      case 2:
        e.value = decode_set(r, floor);
        break;
      default:
        e.value = decode_scalar(r);
        break;
    }
    m.entries.emplace_hint(m.entries.end(), std::move(key), std::move(e));
  }
  return m;
}

}  // namespace

Bytes encode_state(const core::ObjectStore& store) {
  Writer w;
  w.count(store.size());
  for (const auto& [id, obj] : store) {
    w.str(id);
    w.u8(static_cast<std::uint8_t>(obj.type()));
    encode_stamp(w, obj.type_stamp);
    encode_opt_stamp(w, obj.floor);
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, core::CounterState>) {
            encode_counter(w, s);
          } else if constexpr (std::is_same_v<T, core::SetState>) {
            encode_set(w, s);
          } else {
            encode_map(w, s);
          }
        },
        obj.value);
  }
  return w.take();
}

core::ObjectStore decode_state(std::span<const std::uint8_t> in) {
  Reader r(in);
  core::ObjectStore store;
  const std::size_t n = r.count(4 + 1 + 12 + 1 + 4);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = r.str();
    if (!store.empty() && !(store.rbegin()->first < id)) malformed("objects not sorted");
    const std::uint8_t type = r.u8();
    if (!valid_object_type(type)) throw DecodeError(DecodeErrc::kUnknownTag, "unknown object type");
    core::Object obj;
    obj.type_stamp = decode_stamp(r);
    obj.floor = decode_opt_stamp(r);
    if (!valid_replica_id(obj.type_stamp.replica_id)) malformed("invalid type stamp");
    if (!above(obj.type_stamp, obj.floor)) malformed("type stamp at or below floor");
    switch (static_cast<ObjectType>(type)) {
      case ObjectType::kCounter:
        obj.value = decode_counter(r, obj.floor);
        break;
      case ObjectType::kSet:
        obj.value = decode_set(r, obj.floor);
        break;
      case ObjectType::kMap:
        obj.value = decode_map(r, obj.floor);
        break;
    }
    store.emplace_hint(store.end(), std::move(id), std::move(obj));
  }
  r.expect_done();
  return store;
}

// ---------------------------------------------------------------------------
// Value views
//
//   view  := u8 0 | u8 1 i64 | u8 2 count bytes* | u8 3 count (str key, entry)*
//   entry := u8 1 i64 | u8 2 count bytes* | u8 4 scalar

namespace {

void encode_elements(Writer& w, const std::vector<Bytes>& elems) {
  w.count(elems.size());
  for (const auto& e : elems) w.bytes(e);
}

std::vector<Bytes> decode_elements(Reader& r) {
  std::vector<Bytes> out(r.count(4));
  for (auto& e : out) e = r.bytes();
  return out;
}

}  // namespace

void encode_view(Writer& w, const ValueView& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AbsentView>) {
          w.u8(0);
        } else if constexpr (std::is_same_v<T, CounterValue>) {
          w.u8(1);
          w.i64(x.value);
        } else if constexpr (std::is_same_v<T, SetValue>) {
          w.u8(2);
          encode_elements(w, x.elements);
        } else {
          w.u8(3);
          w.count(x.entries.size());
          for (const auto& [key, e] : x.entries) {
            w.str(key);
            if (const auto* c = std::get_if<CounterValue>(&e)) {
              w.u8(1);
              w.i64(c->value);
            } else if (const auto* s = std::get_if<SetValue>(&e)) {
              w.u8(2);
              encode_elements(w, s->elements);
            } else {
              w.u8(4);
              encode_scalar(w, std::get<RegisterValue>(e).value);
            }
          }
        }
      },
      v);
}

ValueView decode_view(Reader& r) {
  switch (r.u8()) {
    case 0:
      return AbsentView{};
    case 1:
      return CounterValue{r.i64()};
    case 2:
      return SetValue{decode_elements(r)};
    case 3: {
      MapValue m;
      const std::size_t n = r.count(5);
      for (std::size_t i = 0; i < n; ++i) {
        std::string key = r.str();
        switch (r.u8()) {
          case 1:
            m.entries.emplace_back(std::move(key), CounterValue{r.i64()});
            break;
          case 2:
            m.entries.emplace_back(std::move(key), SetValue{decode_elements(r)});
            break;
          case 4:
            m.entries.emplace_back(std::move(key), RegisterValue{decode_scalar(r)});
            break;
          default:
            throw DecodeError(DecodeErrc::kUnknownTag, "unknown view entry tag");
        }
      }
      return m;
    }
    default:
      throw DecodeError(DecodeErrc::kUnknownTag, "unknown view tag");
  }
}

Bytes encode_view(const ValueView& v) {
  Writer w;
  encode_view(w, v);
  return w.take();
}

ValueView decode_view(std::span<const std::uint8_t> in) {
  Reader r(in);
  ValueView v = decode_view(r);
  r.expect_done();
  return v;
}

}  // namespace polyrdl::cdf
