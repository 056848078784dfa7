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

#ifndef POLYRDL_HARNESS_WORKLOAD_HPP_
#define POLYRDL_HARNESS_WORKLOAD_HPP_

#include <string>
#include <vector>

#include "polyrdl/core/replica.hpp"
#include "polyrdl/harness/generators.hpp"

namespace polyrdl::harness {

/// Objects and value alphabets a workload draws from. Each object keeps
/// one type for the whole run.
struct WorkloadSpec {
  std::vector<std::string> counters{"c"};
  std::vector<std::string> sets{"s"};
  std::vector<std::string> maps{"m"};
  std::vector<std::string> elements{"x", "y", "z"};
  std::vector<std::string> keys{"k1", "k2", "k3"};
};

struct LocalOp {
  std::string object_id;
  ObjectType type = ObjectType::kCounter;
  OpPayload op;
};

/// Live tags of `element` in a set object, or in the set under `key` of a map.
std::vector<UpdateId> observed_tags(const Replica& r, const std::string& object_id, const Bytes& element);
std::vector<UpdateId> observed_tags(const Replica& r, const std::string& object_id, const std::string& key,
                                    const Bytes& element);

/// A random application update against `r`'s current state. Removes name
/// exactly the tags `r` currently sees, as an observed-remove client would.
LocalOp next_local_op(Rng& rng, const Replica& r, const WorkloadSpec& spec);

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_WORKLOAD_HPP_
