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

#include "polyrdl/plugins/undo.hpp"

#include <algorithm>
#include <charconv>

#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/error.hpp"

namespace polyrdl::plugins {

namespace {

using plugin::UpdateArgs;

bool has(const SetValue& s, const Bytes& e) { return std::binary_search(s.elements.begin(), s.elements.end(), e); }

const EntryValue* entry(const ValueView& v, const std::string& key) {
  const auto* m = std::get_if<MapValue>(&v);
  return m ? m->find(key) : nullptr;
}

bool entry_has(const ValueView& v, const std::string& key, const Bytes& e) {
  const EntryValue* x = entry(v, key);
  const auto* s = x ? std::get_if<SetValue>(x) : nullptr;
  return s && has(*s, e);
}

/// Re-creates a map entry as it was. `clear_first` drops whatever is there
/// now before rebuilding a counter or a set.
void restore_entry(std::vector<UpdateArgs>& out, const std::string& obj, const std::string& key, const EntryValue* prior,
                   bool clear_first) {
  auto emit = [&](OpPayload op) { out.push_back({obj, ObjectType::kMap, std::move(op)}); };
  if (!prior) {
    emit(op::MapRemoveKey{key});
    return;
  }
  if (const auto* r = std::get_if<RegisterValue>(prior)) {
    emit(op::MapPut{key, r->value});
    return;
  }
  if (clear_first) emit(op::MapRemoveKey{key});
  if (const auto* c = std::get_if<CounterValue>(prior)) {
    emit(op::MapCounterAdd{key, c->value});
  } else if (const auto* s = std::get_if<SetValue>(prior)) {
    for (const auto& e : s->elements) emit(op::MapSetAdd{key, e});
  }
}

}  // namespace

std::string_view to_string(UndoCode c) {
  switch (c) {
    case UndoCode::kOk: return "OK";
    case UndoCode::kUnknownUpdate: return "UNKNOWN_UPDATE";
    case UndoCode::kIdempotentNoop: return "IDEMPOTENT_NOOP";
    case UndoCode::kUnsupported: return "UNSUPPORTED";
    case UndoCode::kCommandFailed: return "COMMAND_FAILED";
  }
  return "?";
}

std::optional<UpdateId> parse_update_id(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  std::uint64_t seq = 0;
  const auto digits = s.substr(colon + 1);
  const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seq);
  if (ec != std::errc() || p != digits.data() + digits.size() || seq == 0) return std::nullopt;
  return UpdateId{std::string(s.substr(0, colon)), seq};
}

std::vector<UpdateArgs> compensations(const Update& t, const plugin::ChangeViews& v) {
  std::vector<UpdateArgs> out;
  const std::string& obj = t.object_id;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::CounterAdd>) {
          out.push_back({obj, ObjectType::kCounter, op::CounterAdd{-o.delta}});
        } else if constexpr (std::is_same_v<T, op::SetAdd>) {
          // Only this add's tag: concurrent adds of the same element survive.
          out.push_back({obj, ObjectType::kSet, op::SetRemove{o.element, {t.id}}});
        } else if constexpr (std::is_same_v<T, op::SetRemove>) {
          const auto* before = std::get_if<SetValue>(&v.before);
          const auto* after = std::get_if<SetValue>(&v.after);
          if (before && has(*before, o.element) && !(after && has(*after, o.element))) {
            out.push_back({obj, ObjectType::kSet, op::SetAdd{o.element}});
          }
        } else if constexpr (std::is_same_v<T, op::MapPut>) {
          restore_entry(out, obj, o.key, entry(v.before, o.key), true);
        } else if constexpr (std::is_same_v<T, op::MapRemoveKey>) {
          if (const EntryValue* prior = entry(v.before, o.key)) restore_entry(out, obj, o.key, prior, false);
        } else if constexpr (std::is_same_v<T, op::MapCounterAdd>) {
          out.push_back({obj, ObjectType::kMap, op::MapCounterAdd{o.key, -o.delta}});
        } else if constexpr (std::is_same_v<T, op::MapSetAdd>) {
          out.push_back({obj, ObjectType::kMap, op::MapSetRemove{o.key, o.element, {t.id}}});
        } else if constexpr (std::is_same_v<T, op::MapSetRemove>) {
          if (entry_has(v.before, o.key, o.element) && !entry_has(v.after, o.key, o.element)) {
            out.push_back({obj, ObjectType::kMap, op::MapSetAdd{o.key, o.element}});
          }
        } else {
          throw Error(Errc::kInvalidArgument, "a Reset cannot be undone");
        }
      },
      t.op);
  return out;
}

UndoPlugin::UndoPlugin(plugin::EndpointOptions opt)
    : endpoint_(std::move(opt), [this](const cdf::PluginEvent& ev) { observe(ev); }) {}

void UndoPlugin::observe(const cdf::PluginEvent& ev) {
  // Resets are kept too, so undoing one is refused as unsupported rather than unknown.
  if (!ev.update) return;
  plugin::ChangeViews views;
  if (!ev.result_view.empty()) {
    try {
      views = plugin::decode_change(ev.result_view);
    } catch (const cdf::DecodeError&) {
      return;
    }
  }
  std::lock_guard lock(mu_);
  shadow_.try_emplace(ev.update->id, Shadow{*ev.update, std::move(views), false});
}

std::size_t UndoPlugin::shadow_size() const {
  std::lock_guard lock(mu_);
  return shadow_.size();
}

bool UndoPlugin::knows(const UpdateId& id) const {
  std::lock_guard lock(mu_);
  return shadow_.count(id) > 0;
}

UndoResult UndoPlugin::undo(const UpdateId& target) {
  UndoResult res;
  std::vector<UpdateArgs> plan;
  {
    std::lock_guard lock(mu_);
    auto it = shadow_.find(target);
    if (it == shadow_.end()) return {UndoCode::kUnknownUpdate, {}, "no update " + to_string(target) + " observed"};
    if (it->second.compensated) return {UndoCode::kIdempotentNoop, {}, to_string(target) + " was already undone"};
    try {
      plan = compensations(it->second.update, it->second.views);
    } catch (const Error& e) {
      return {UndoCode::kUnsupported, {}, e.what()};
    }
    it->second.compensated = true;
  }
  for (const auto& args : plan) {
    plugin::CommandReply r = endpoint_.call("update", plugin::encode_update_args(args));
    if (r.error || !r.event || !r.event->update) {
      res.code = UndoCode::kCommandFailed;
      res.message = r.error ? r.error->message : "no update in reply";
      return res;
    }
    res.issued.push_back(*r.event->update);
  }
  return res;
}

}  // namespace polyrdl::plugins
