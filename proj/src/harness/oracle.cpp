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

#include "polyrdl/harness/oracle.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "polyrdl/cdf/digest.hpp"
#include "polyrdl/cdf/wire.hpp"

// Shares only the primitive reader/writer with the library; the data model,
// snapshot parser, fold and canonical writer below are separate on purpose.

namespace polyrdl::harness {

namespace {

constexpr int kFloor = 0;
constexpr int kCounter = 1;
constexpr int kSet = 2;
constexpr int kMap = 3;
constexpr int kRegister = 4;

struct Mark {};
struct Contrib {
  UpdateId id;
  std::uint64_t lamport;
  std::int64_t delta;
};
struct Add {
  UpdateId tag;
  std::uint64_t lamport;
  Bytes element;
};
struct Remove {
  std::vector<UpdateId> tags;
  LamportStamp stamp;
};
struct Put {
  Scalar value;
};
using Leaf = std::variant<Mark, Contrib, Add, Remove, Put>;

struct Nested {
  std::string key;
  int kind;  // kFloor for a key removal
  Leaf leaf;
};

struct Event {
  LamportStamp stamp;
  std::size_t order;
  std::string object;
  int type;  // kFloor, kCounter, kSet, kMap
  std::variant<Leaf, Nested> body;
};

struct Counter {
  std::map<UpdateId, std::pair<std::uint64_t, std::int64_t>> contribs;
};

struct Set {
  std::map<Bytes, std::map<UpdateId, std::uint64_t>> live;
  std::map<UpdateId, LamportStamp> removed;
};

struct Entry {
  int kind = 0;
  LamportStamp type_stamp;
  std::optional<LamportStamp> floor;
  Counter counter;
  Set set;
  Scalar reg;
};

struct Obj {
  int type = 0;
  LamportStamp type_stamp;
  std::optional<LamportStamp> floor;
  Counter counter;
  Set set;
  std::map<std::string, Entry> entries;
};

void apply_leaf(Counter& c, Set& s, Scalar& reg, const Leaf& leaf) {
  if (const auto* x = std::get_if<Contrib>(&leaf)) {
    c.contribs.emplace(x->id, std::make_pair(x->lamport, x->delta));
  } else if (const auto* a = std::get_if<Add>(&leaf)) {
    if (s.removed.contains(a->tag)) return;
    for (const auto& [e, tags] : s.live) {
      if (tags.contains(a->tag)) return;
    }
    s.live[a->element].emplace(a->tag, a->lamport);
  } else if (const auto* r = std::get_if<Remove>(&leaf)) {
    for (const auto& tag : r->tags) {
      for (auto it = s.live.begin(); it != s.live.end(); ++it) {
        if (it->second.erase(tag) > 0) {
          if (it->second.empty()) s.live.erase(it);
          break;
        }
      }
      auto& st = s.removed[tag];
      if (st < r->stamp) st = r->stamp;
    }
  } else if (const auto* p = std::get_if<Put>(&leaf)) {
    reg = p->value;
  }
}

void apply_nested(Obj& o, const LamportStamp& stamp, const Nested& n) {
  Entry& e = o.entries[n.key];
  if (n.kind == kFloor) {
    e = Entry{};
    e.floor = stamp;
    return;
  }
  if (e.kind != n.kind) {
    if (e.kind != 0) {
      auto keep = e.type_stamp;
      e = Entry{};
      e.floor = keep;
    }
    e.kind = n.kind;
  }
  e.type_stamp = stamp;
  apply_leaf(e.counter, e.set, e.reg, n.leaf);
}

void fold_event(std::map<std::string, Obj>& objs, const Event& ev) {
  Obj& o = objs[ev.object];
  if (ev.type == kFloor) {
    o = Obj{};
    o.floor = ev.stamp;
    return;
  }
  if (o.type != ev.type) {
    if (o.type != 0) {
      auto keep = o.type_stamp;
      o = Obj{};
      o.floor = keep;
    }
    o.type = ev.type;
  }
  o.type_stamp = ev.stamp;
  if (const auto* n = std::get_if<Nested>(&ev.body)) {
    apply_nested(o, ev.stamp, *n);
  } else {
    Scalar unused;
    apply_leaf(o.counter, o.set, unused, std::get<Leaf>(ev.body));
  }
}

class EventSink {
 public:
  void top(const LamportStamp& s, const std::string& object, int type, Leaf leaf) {
    events_.push_back(Event{s, events_.size(), object, type, std::move(leaf)});
  }
  void nested(const LamportStamp& s, const std::string& object, std::string key, int kind, Leaf leaf) {
    events_.push_back(Event{s, events_.size(), object, kMap, Nested{std::move(key), kind, std::move(leaf)}});
  }
  std::vector<Event>& events() { return events_; }

 private:
  std::vector<Event> events_;
};

void expand_update(EventSink& sink, const Update& u) {
  const LamportStamp s{u.lamport, u.id.replica_id};
  const std::string& obj = u.object_id;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::CounterAdd>) {
          sink.top(s, obj, kCounter, Contrib{u.id, u.lamport, o.delta});
        } else if constexpr (std::is_same_v<T, op::SetAdd>) {
          sink.top(s, obj, kSet, Add{u.id, u.lamport, o.element});
        } else if constexpr (std::is_same_v<T, op::SetRemove>) {
          sink.top(s, obj, kSet, Remove{o.observed_tags, s});
        } else if constexpr (std::is_same_v<T, op::MapPut>) {
          sink.nested(s, obj, o.key, kRegister, Put{o.value});
        } else if constexpr (std::is_same_v<T, op::MapRemoveKey>) {
          sink.nested(s, obj, o.key, kFloor, Mark{});
        } else if constexpr (std::is_same_v<T, op::MapCounterAdd>) {
          sink.nested(s, obj, o.key, kCounter, Contrib{u.id, u.lamport, o.delta});
        } else if constexpr (std::is_same_v<T, op::MapSetAdd>) {
          sink.nested(s, obj, o.key, kSet, Add{u.id, u.lamport, o.element});
        } else if constexpr (std::is_same_v<T, op::MapSetRemove>) {
          sink.nested(s, obj, o.key, kSet, Remove{o.observed_tags, s});
        }
      },
      u.op);
}

// --- snapshot parsing -------------------------------------------------------

LamportStamp read_stamp(cdf::Reader& r) {
  LamportStamp s;
  s.lamport = r.u64();
  s.replica_id = r.str();
  return s;
}

std::optional<LamportStamp> read_opt_stamp(cdf::Reader& r) {
  if (r.u8() == 0) return std::nullopt;
  return read_stamp(r);
}

UpdateId read_id(cdf::Reader& r) {
  UpdateId id;
  id.replica_id = r.str();
  id.seq = r.u64();
  return id;
}

Scalar read_scalar(cdf::Reader& r) {
  switch (r.u8()) {
    case 1:
      return r.i64();
    case 2:
      return r.f64();
    case 3:
      return r.u8() != 0;
    case 4:
      return r.str();
    default:
      return r.bytes();
  }
}

template <class Emit>
void read_counter(cdf::Reader& r, Emit emit) {
  const std::size_t n = r.u32();
  for (std::size_t i = 0; i < n; ++i) {
    UpdateId id = read_id(r);
    std::uint64_t lamport = r.u64();
    std::int64_t delta = r.i64();
    emit(LamportStamp{lamport, id.replica_id}, Leaf{Contrib{id, lamport, delta}});
  }
}

template <class Emit>
void read_set(cdf::Reader& r, Emit emit) {
  const std::size_t n = r.u32();
  for (std::size_t i = 0; i < n; ++i) {
    Bytes element = r.bytes();
    const std::size_t m = r.u32();
    for (std::size_t j = 0; j < m; ++j) {
      UpdateId tag = read_id(r);
      std::uint64_t lamport = r.u64();
      emit(LamportStamp{lamport, tag.replica_id}, Leaf{Add{tag, lamport, element}});
    }
  }
  const std::size_t removed = r.u32();
  for (std::size_t i = 0; i < removed; ++i) {
    UpdateId tag = read_id(r);
    LamportStamp stamp = read_stamp(r);
    emit(stamp, Leaf{Remove{{tag}, stamp}});
  }
}

void expand_snapshot(EventSink& sink, std::span<const std::uint8_t> snapshot) {
  cdf::Reader r(snapshot);
  const std::size_t n = r.u32();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string obj = r.str();
    const int type = r.u8();
    const LamportStamp type_stamp = read_stamp(r);
    if (auto floor = read_opt_stamp(r)) sink.top(*floor, obj, kFloor, Mark{});
    sink.top(type_stamp, obj, type, Mark{});
    auto top = [&](const LamportStamp& s, Leaf leaf) { sink.top(s, obj, type, std::move(leaf)); };
    if (type == kCounter) {
      read_counter(r, top);
    } else if (type == kSet) {
      read_set(r, top);
    } else {
      const std::size_t entries = r.u32();
      for (std::size_t e = 0; e < entries; ++e) {
        const std::string key = r.str();
        const int kind = r.u8();
        LamportStamp entry_stamp;
        if (kind != 0) entry_stamp = read_stamp(r);
        if (auto floor = read_opt_stamp(r)) sink.nested(*floor, obj, key, kFloor, Mark{});
        auto nested = [&](const LamportStamp& s, Leaf leaf) { sink.nested(s, obj, key, kind, std::move(leaf)); };
        if (kind == kCounter) {
          sink.nested(entry_stamp, obj, key, kind, Mark{});
          read_counter(r, nested);
        } else if (kind == kSet) {
          sink.nested(entry_stamp, obj, key, kind, Mark{});
          read_set(r, nested);
        } else if (kind == kRegister) {
          sink.nested(entry_stamp, obj, key, kind, Put{read_scalar(r)});
        }
      }
    }
  }
}

// --- canonical writer -------------------------------------------------------

void write_stamp(cdf::Writer& w, const LamportStamp& s) {
  w.u64(s.lamport);
  w.str(s.replica_id);
}

void write_opt_stamp(cdf::Writer& w, const std::optional<LamportStamp>& s) {
  w.u8(s ? 1 : 0);
  if (s) write_stamp(w, *s);
}

void write_counter(cdf::Writer& w, const Counter& c) {
  w.u32(static_cast<std::uint32_t>(c.contribs.size()));
  for (const auto& [id, v] : c.contribs) {
    w.str(id.replica_id);
    w.u64(id.seq);
    w.u64(v.first);
    w.i64(v.second);
  }
}

void write_set(cdf::Writer& w, const Set& s) {
  w.u32(static_cast<std::uint32_t>(s.live.size()));
  for (const auto& [e, tags] : s.live) {
    w.bytes(e);
    w.u32(static_cast<std::uint32_t>(tags.size()));
    for (const auto& [tag, lamport] : tags) {
      w.str(tag.replica_id);
      w.u64(tag.seq);
      w.u64(lamport);
    }
  }
  w.u32(static_cast<std::uint32_t>(s.removed.size()));
  for (const auto& [tag, stamp] : s.removed) {
    w.str(tag.replica_id);
    w.u64(tag.seq);
    write_stamp(w, stamp);
  }
}

void write_scalar(cdf::Writer& w, const Scalar& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          w.u8(1);
          w.i64(x);
        } else if constexpr (std::is_same_v<T, double>) {
          w.u8(2);
          w.f64(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          w.u8(3);
          w.u8(x ? 1 : 0);
        } else if constexpr (std::is_same_v<T, std::string>) {
          w.u8(4);
          w.str(x);
        } else {
          w.u8(5);
          w.bytes(x);
        }
      },
      v);
}

Bytes write_state(const std::map<std::string, Obj>& objs) {
  cdf::Writer w;
  std::size_t live = 0;
  for (const auto& [id, o] : objs) live += o.type != 0 ? 1 : 0;
  w.u32(static_cast<std::uint32_t>(live));
  for (const auto& [id, o] : objs) {
    if (o.type == 0) continue;
    w.str(id);
    w.u8(static_cast<std::uint8_t>(o.type));
    write_stamp(w, o.type_stamp);
    write_opt_stamp(w, o.floor);
    if (o.type == kCounter) {
      write_counter(w, o.counter);
    } else if (o.type == kSet) {
      write_set(w, o.set);
    } else {
      w.u32(static_cast<std::uint32_t>(o.entries.size()));
      for (const auto& [key, e] : o.entries) {
        w.str(key);
        w.u8(static_cast<std::uint8_t>(e.kind));
        if (e.kind != 0) write_stamp(w, e.type_stamp);
        write_opt_stamp(w, e.floor);
        if (e.kind == kCounter) write_counter(w, e.counter);
        if (e.kind == kSet) write_set(w, e.set);
        if (e.kind == kRegister) write_scalar(w, e.reg);
      }
    }
  }
  return w.take();
}

}  // namespace

Bytes oracle_fold(std::span<const Update> updates) {
  std::map<UpdateId, const Update*> unique;
  for (const auto& u : updates) unique.emplace(u.id, &u);

  // An epoch only exists once a Reset has opened it; updates stamped with an
  // epoch nobody opened cannot take effect anywhere.
  std::uint64_t epoch = 0;
  for (const auto& [id, u] : unique) {
    if (u->is_reset()) epoch = std::max(epoch, u->epoch);
  }

  const Update* baseline = nullptr;
  for (const auto& [id, u] : unique) {
    if (u->epoch != epoch || !u->is_reset()) continue;
    if (!baseline || baseline->stamp() < u->stamp()) baseline = u;
  }

  EventSink sink;
  if (baseline) expand_snapshot(sink, std::get<op::Reset>(baseline->op).snapshot);
  for (const auto& [id, u] : unique) {
    if (u->epoch == epoch && !u->is_reset()) expand_update(sink, *u);
  }

  auto& events = sink.events();
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.stamp != b.stamp) return a.stamp < b.stamp;
    return a.order < b.order;
  });
  std::map<std::string, Obj> objs;
  for (const auto& ev : events) fold_event(objs, ev);
  return write_state(objs);
}

std::array<std::uint8_t, 32> oracle_digest(std::span<const Update> updates) {
  return cdf::sha256(oracle_fold(updates));
}

}  // namespace polyrdl::harness
