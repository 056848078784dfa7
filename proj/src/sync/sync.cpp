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

#include "polyrdl/sync/sync.hpp"

#include <algorithm>
#include <map>

#include "polyrdl/core/error.hpp"

namespace polyrdl::sync {

MergeReport& MergeReport::operator+=(const MergeReport& o) {
  applied += o.applied;
  duplicates += o.duplicates;
  stale += o.stale;
  deferred += o.deferred;
  if (error.empty()) error = o.error;
  return *this;
}

cdf::SyncMessage make_sync(const Replica& r, const PeerSummary* peer) {
  cdf::SyncMessage m;
  m.sender = r.id();
  m.sender_epoch = r.epoch();
  m.version_vector = r.known().entries();
  std::map<std::string, std::uint64_t> skip;
  if (peer) skip.insert(peer->begin(), peer->end());
  for (const auto& u : r.log()) {
    auto it = skip.find(u.id.replica_id);
    if (it != skip.end() && u.id.seq <= it->second) continue;
    m.updates.push_back(u);
  }
  std::sort(m.updates.begin(), m.updates.end(), [](const Update& a, const Update& b) { return a.id < b.id; });
  return m;
}

cdf::SyncMessage make_sync_from(const Replica& r, std::size_t from) {
  cdf::SyncMessage m;
  m.sender = r.id();
  m.sender_epoch = r.epoch();
  m.version_vector = r.known().entries();
  const auto& log = r.log();
  if (from < log.size()) m.updates.assign(log.begin() + static_cast<std::ptrdiff_t>(from), log.end());
  std::sort(m.updates.begin(), m.updates.end(), [](const Update& a, const Update& b) { return a.id < b.id; });
  return m;
}

MergeReport merge_sync(Replica& r, const cdf::SyncMessage& m) {
  MergeReport rep;
  const std::uint64_t before = r.commit_count();
  for (const auto& u : m.updates) {
    try {
      switch (r.apply_update(u)) {
        case ApplyResult::kApplied:
          break;
        case ApplyResult::kDuplicate:
          ++rep.duplicates;
          break;
        case ApplyResult::kStaleEpoch:
          ++rep.stale;
          break;
        case ApplyResult::kDeferred:
          ++rep.deferred;
          break;
      }
    } catch (const Error& e) {
      rep.error = to_string(u.id) + ": " + e.what();
      break;
    }
  }
  rep.applied = r.commit_count() - before;
  return rep;
}

}  // namespace polyrdl::sync
