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

#ifndef POLYRDL_CORE_VIEW_HPP_
#define POLYRDL_CORE_VIEW_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "polyrdl/core/state.hpp"
#include "polyrdl/core/types.hpp"

namespace polyrdl {

// Resolved, metadata-free values as returned by Access.

struct AbsentView {
  friend bool operator==(const AbsentView&, const AbsentView&) = default;
};
struct CounterValue {
  std::int64_t value = 0;
  friend bool operator==(const CounterValue&, const CounterValue&) = default;
};
struct SetValue {
  std::vector<Bytes> elements;  // sorted bytewise
  friend bool operator==(const SetValue&, const SetValue&) = default;
};
struct RegisterValue {
  Scalar value;
  friend bool operator==(const RegisterValue& a, const RegisterValue& b) { return scalar_equal(a.value, b.value); }
};

using EntryValue = std::variant<CounterValue, SetValue, RegisterValue>;

struct MapValue {
  std::vector<std::pair<std::string, EntryValue>> entries;  // sorted by key

  const EntryValue* find(const std::string& key) const;
  friend bool operator==(const MapValue&, const MapValue&) = default;
};

using ValueView = std::variant<AbsentView, CounterValue, SetValue, MapValue>;

ValueView resolve(const core::Object& obj);
ValueView empty_view(ObjectType t);

std::string describe(const ValueView& v);

}  // namespace polyrdl

#endif  // POLYRDL_CORE_VIEW_HPP_
