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

#ifndef POLYRDL_SYNC_SYNC_HPP_
#define POLYRDL_SYNC_SYNC_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/core/replica.hpp"

namespace polyrdl::sync {

struct MergeReport {
  std::uint64_t applied = 0;  // commits caused by the batch, released deferrals included
  std::uint64_t duplicates = 0;
  std::uint64_t stale = 0;
  std::uint64_t deferred = 0;
  // Set when a malformed update stopped the batch; earlier updates stay.
  std::string error;

  MergeReport& operator+=(const MergeReport& o);
  friend bool operator==(const MergeReport&, const MergeReport&) = default;
};

using PeerSummary = std::vector<std::pair<std::string, std::uint64_t>>;

/// The replica's whole retained log. With `peer`, updates at or below the
/// peer's advertised watermarks are left out.
cdf::SyncMessage make_sync(const Replica& r, const PeerSummary* peer = nullptr);

/// Delta form for a sender that tracks how much of its log a peer already
/// has: only entries from position `from` on. Only meaningful while the log
/// grows by appending, i.e. between Resets.
cdf::SyncMessage make_sync_from(const Replica& r, std::size_t from);

/// Applies the updates one at a time, in message order.
MergeReport merge_sync(Replica& r, const cdf::SyncMessage& m);

}  // namespace polyrdl::sync

#endif  // POLYRDL_SYNC_SYNC_HPP_
