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

#ifndef POLYRDL_HARNESS_PLUGIN_CHECKS_HPP_
#define POLYRDL_HARNESS_PLUGIN_CHECKS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace polyrdl::harness {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// One integrate call over a batch of valid and broken metadata files. Each
/// entry must get its own code and only the valid ones end up deployed.
CheckResult check_integration_batch();

/// Three simulated replicas, the logging plug-in on the first. Every update
/// that replica commits, local or merged, must show up in the audit file
/// exactly once.
CheckResult check_logging_completeness(std::uint64_t seed, std::size_t ops);

/// One undo case per op kind, plus the shared-element set case. Each checks
/// that replicas converge to the oracle of history plus compensations and
/// that the undone object reads as the oracle without the target.
std::vector<CheckResult> check_undo_kinds();

/// UNKNOWN_UPDATE, IDEMPOTENT_NOOP and UNSUPPORTED (Reset).
CheckResult check_undo_refusals();

/// checkpoint at 10, add 3, restore, all read 10; add 1, all read 11.
CheckResult check_rollback_sim();
/// As above, with a partitioned replica adding while the restore happens:
/// its older-epoch update is discarded everywhere.
CheckResult check_rollback_straggler_sim();
/// The first scenario over loopback TCP.
CheckResult check_rollback_tcp();

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_PLUGIN_CHECKS_HPP_
