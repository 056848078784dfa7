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

#include "polyrdl/harness/workload.hpp"

namespace polyrdl::harness {

namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng() % v.size()];
}

std::vector<UpdateId> tags_of(const core::SetState& s, const Bytes& e) {
  std::vector<UpdateId> out;
  if (auto it = s.live.find(e); it != s.live.end()) {
    for (const auto& [tag, lamport] : it->second) out.push_back(tag);
  }
  return out;
}

const core::SetState* set_at(const Replica& r, const std::string& obj) {
  auto it = r.objects().find(obj);
  if (it == r.objects().end()) return nullptr;
  return std::get_if<core::SetState>(&it->second.value);
}

const core::SetState* nested_set_at(const Replica& r, const std::string& obj, const std::string& key) {
  auto it = r.objects().find(obj);
  if (it == r.objects().end()) return nullptr;
  const auto* m = std::get_if<core::MapState>(&it->second.value);
  if (!m) return nullptr;
  auto e = m->entries.find(key);
  if (e == m->entries.end()) return nullptr;
  return std::get_if<core::SetState>(&e->second.value);
}

Scalar random_value(Rng& rng) {
  switch (rng() % 4) {
    case 0: return static_cast<std::int64_t>(rng() % 100) - 50;
    case 1: return static_cast<double>(rng() % 1000) / 8.0;
    case 2: return rng() % 2 == 0;
    default: return std::string("v") + std::to_string(rng() % 10);
  }
}

}  // namespace

std::vector<UpdateId> observed_tags(const Replica& r, const std::string& object_id, const Bytes& element) {
  const auto* s = set_at(r, object_id);
  return s ? tags_of(*s, element) : std::vector<UpdateId>{};
}

std::vector<UpdateId> observed_tags(const Replica& r, const std::string& object_id, const std::string& key,
                                    const Bytes& element) {
  const auto* s = nested_set_at(r, object_id, key);
  return s ? tags_of(*s, element) : std::vector<UpdateId>{};
}

LocalOp next_local_op(Rng& rng, const Replica& r, const WorkloadSpec& spec) {
  std::vector<ObjectType> types;
  if (!spec.counters.empty()) types.push_back(ObjectType::kCounter);
  if (!spec.sets.empty()) types.push_back(ObjectType::kSet);
  if (!spec.maps.empty()) types.push_back(ObjectType::kMap);
  LocalOp out;
  out.type = pick(rng, types);
  auto delta = [&] { return static_cast<std::int64_t>(rng() % 21) - 10; };
  switch (out.type) {
    case ObjectType::kCounter:
      out.object_id = pick(rng, spec.counters);
      out.op = op::CounterAdd{delta()};
      break;
    case ObjectType::kSet: {
      out.object_id = pick(rng, spec.sets);
      const Bytes e = to_bytes(pick(rng, spec.elements));
      if (rng() % 3 == 0) {
        const auto* s = set_at(r, out.object_id);
        out.op = op::SetRemove{e, s ? tags_of(*s, e) : std::vector<UpdateId>{}};
      } else {
        out.op = op::SetAdd{e};
      }
      break;
    }
    case ObjectType::kMap: {
      out.object_id = pick(rng, spec.maps);
      const std::string key = pick(rng, spec.keys);
      const Bytes e = to_bytes(pick(rng, spec.elements));
      switch (rng() % 10) {
        case 0:
        case 1:
        case 2: out.op = op::MapPut{key, random_value(rng)}; break;
        case 3: out.op = op::MapRemoveKey{key}; break;
        case 4:
        case 5: out.op = op::MapCounterAdd{key, delta()}; break;
        case 6:
        case 7: out.op = op::MapSetAdd{key, e}; break;
        default: {
          const auto* s = nested_set_at(r, out.object_id, key);
          out.op = op::MapSetRemove{key, e, s ? tags_of(*s, e) : std::vector<UpdateId>{}};
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace polyrdl::harness
