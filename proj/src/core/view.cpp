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

#include "polyrdl/core/view.hpp"

#include <algorithm>
#include <sstream>

namespace polyrdl {

const EntryValue* MapValue::find(const std::string& key) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& kv, const std::string& k) { return kv.first < k; });
  if (it == entries.end() || it->first != key) return nullptr;
  return &it->second;
}

ValueView resolve(const core::Object& obj) {
  return std::visit(
      [](const auto& s) -> ValueView {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, core::CounterState>) {
          return CounterValue{s.value()};
        } else if constexpr (std::is_same_v<T, core::SetState>) {
          return SetValue{s.elements()};
        } else {
          MapValue m;
          for (const auto& [key, entry] : s.entries) {
            if (const auto* c = std::get_if<core::CounterState>(&entry.value)) {
              m.entries.emplace_back(key, CounterValue{c->value()});
            } else if (const auto* st = std::get_if<core::SetState>(&entry.value)) {
              m.entries.emplace_back(key, SetValue{st->elements()});
            } else if (const auto* r = std::get_if<Scalar>(&entry.value)) {
              m.entries.emplace_back(key, RegisterValue{*r});
            }
          }
          return m;
        }
      },
      obj.value);
}

ValueView empty_view(ObjectType t) {
  switch (t) {
    case ObjectType::kCounter:
      return CounterValue{};
    case ObjectType::kSet:
      return SetValue{};
    case ObjectType::kMap:
      return MapValue{};
  }
  return AbsentView{};
}

namespace {

void describe_bytes(std::ostream& os, const Bytes& b) { os << '"' << to_string(b) << '"'; }

void describe_scalar(std::ostream& os, const Scalar& s) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          os << (v ? "true" : "false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          os << '"' << v << '"';
        } else if constexpr (std::is_same_v<T, Bytes>) {
          os << "b";
          describe_bytes(os, v);
        } else {
          os << v;
        }
      },
      s);
}

void describe_set(std::ostream& os, const SetValue& s) {
  os << '[';
  for (std::size_t i = 0; i < s.elements.size(); ++i) {
    if (i) os << ',';
    describe_bytes(os, s.elements[i]);
  }
  os << ']';
}

}  // namespace

std::string describe(const ValueView& v) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AbsentView>) {
          os << "absent";
        } else if constexpr (std::is_same_v<T, CounterValue>) {
          os << x.value;
        } else if constexpr (std::is_same_v<T, SetValue>) {
          describe_set(os, x);
        } else {
          os << '{';
          bool first = true;
          for (const auto& [k, e] : x.entries) {
            if (!first) os << ',';
            first = false;
            os << '"' << k << "\":";
            if (const auto* c = std::get_if<CounterValue>(&e)) os << c->value;
            if (const auto* s = std::get_if<SetValue>(&e)) describe_set(os, *s);
            if (const auto* r = std::get_if<RegisterValue>(&e)) describe_scalar(os, r->value);
          }
          os << '}';
        }
      },
      v);
  return os.str();
}

}  // namespace polyrdl
