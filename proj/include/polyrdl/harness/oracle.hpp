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

#ifndef POLYRDL_HARNESS_ORACLE_HPP_
#define POLYRDL_HARNESS_ORACLE_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "polyrdl/core/types.hpp"

namespace polyrdl::harness {

/// Resolved state of an update set, computed without any of the replica's
/// apply code: pick the baseline (greatest-stamped Reset of the highest
/// epoch, else empty), expand it and every update of that epoch into
/// stamped events, sort by stamp and fold them one at a time. Every event is
/// then the newest seen so far, so type conflicts and key removals reduce to
/// "wipe and start over". Returns canonical state bytes.
Bytes oracle_fold(std::span<const Update> updates);

std::array<std::uint8_t, 32> oracle_digest(std::span<const Update> updates);

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_ORACLE_HPP_
