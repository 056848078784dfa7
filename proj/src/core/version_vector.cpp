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

#include "polyrdl/core/version_vector.hpp"

namespace polyrdl {

bool VersionVector::contains(const UpdateId& id) const {
  auto it = origins_.find(id.replica_id);
  if (it == origins_.end()) return false;
  return id.seq <= it->second.contiguous || it->second.extra.contains(id.seq);
}

void VersionVector::add(const UpdateId& id) {
  Origin& o = origins_[id.replica_id];
  if (id.seq <= o.contiguous) return;
  if (id.seq != o.contiguous + 1) {
    o.extra.insert(id.seq);
    return;
  }
  o.contiguous = id.seq;
  while (!o.extra.empty() && *o.extra.begin() == o.contiguous + 1) {
    o.contiguous = *o.extra.begin();
    o.extra.erase(o.extra.begin());
  }
}

std::uint64_t VersionVector::watermark(const std::string& replica_id) const {
  auto it = origins_.find(replica_id);
  return it == origins_.end() ? 0 : it->second.contiguous;
}

std::vector<std::pair<std::string, std::uint64_t>> VersionVector::entries() const {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& [id, o] : origins_) {
    if (o.contiguous > 0) out.emplace_back(id, o.contiguous);
  }
  return out;
}

}  // namespace polyrdl
