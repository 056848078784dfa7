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

#ifndef POLYRDL_HARNESS_EXHAUSTIVE_HPP_
#define POLYRDL_HARNESS_EXHAUSTIVE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "polyrdl/core/types.hpp"

namespace polyrdl::harness {

/// Hand-built candidate updates for one object each, with stamp ties across
/// replicas, removes of seen and unseen tags and, for the map, type changes
/// and key removals on both keys.
std::vector<Update> counter_candidates();
std::vector<Update> set_candidates();   // elements x and y
std::vector<Update> map_candidates();   // keys k1 and k2
/// The first few candidates of each of the three pools above, 18 in all.
std::vector<Update> combined_candidates();
/// Counter, set and map together, with a Reset and an update of its epoch.
std::vector<Update> mixed_candidates();

struct ExhaustiveResult {
  std::string name;
  std::uint64_t subsets = 0;
  std::uint64_t orders = 0;
  std::uint64_t mismatches = 0;
  std::string first_mismatch;
};

/// Applies every ordering of every subset of at most `max_size` candidates
/// to a fresh replica and compares the state bytes with the oracle's.
ExhaustiveResult exhaustive_check(const std::string& name, const std::vector<Update>& candidates,
                                  std::size_t max_size);

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_EXHAUSTIVE_HPP_
