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

#ifndef POLYRDL_HARNESS_GENERATORS_HPP_
#define POLYRDL_HARNESS_GENERATORS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/core/types.hpp"

namespace polyrdl::harness {

using Rng = std::mt19937_64;

/// Any well-formed update with random field contents, for codec tests.
Update random_update(Rng& rng);
Scalar random_scalar(Rng& rng);
cdf::SyncMessage random_sync(Rng& rng, std::size_t max_updates = 8);

struct PoolOptions {
  std::vector<std::string> replicas{"A", "B", "C"};
  std::vector<std::string> counters{"c"};
  std::vector<std::string> sets{"s"};
  std::vector<std::string> maps{"m"};
  // Object ids that receive ops of every type.
  std::vector<std::string> mixed{};
  std::vector<std::string> keys{"k1", "k2"};
  std::vector<std::string> elements{"x", "y"};
  std::uint64_t max_lamport = 12;
  // Reset probability; each reset also gets a random snapshot.
  double reset_weight = 0.0;
};

/// Independent updates with unique stamps and ids but no causal structure:
/// removes name tags of adds drawn from earlier in the pool (or invented
/// ones), lamports are random. Every epoch above zero that appears is opened
/// by at least one Reset in the pool.
std::vector<Update> random_pool(Rng& rng, std::size_t n, const PoolOptions& opt = {});

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_GENERATORS_HPP_
