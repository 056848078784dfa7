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

#ifndef POLYRDL_CORE_VERSION_VECTOR_HPP_
#define POLYRDL_CORE_VERSION_VECTOR_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polyrdl/core/types.hpp"

namespace polyrdl {

/// Known update ids per origin: a contiguous watermark plus the seqs seen
/// above it.
class VersionVector {
 public:
  struct Origin {
    std::uint64_t contiguous = 0;
    std::set<std::uint64_t> extra;
    friend bool operator==(const Origin&, const Origin&) = default;
  };

  bool contains(const UpdateId& id) const;
  void add(const UpdateId& id);
  std::uint64_t watermark(const std::string& replica_id) const;

  /// (replica_id, highest contiguous seq), sorted, zero watermarks omitted.
  std::vector<std::pair<std::string, std::uint64_t>> entries() const;

  const std::map<std::string, Origin>& origins() const { return origins_; }
  void set_origin(const std::string& replica_id, Origin o) { origins_[replica_id] = std::move(o); }

  friend bool operator==(const VersionVector&, const VersionVector&) = default;

 private:
  std::map<std::string, Origin> origins_;
};

}  // namespace polyrdl

#endif  // POLYRDL_CORE_VERSION_VECTOR_HPP_
