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

#ifndef POLYRDL_HARNESS_CRASH_HPP_
#define POLYRDL_HARNESS_CRASH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace polyrdl::harness {

struct CrashSweepResult {
  std::size_t cases = 0;
  std::size_t matches = 0;
  std::size_t torn_cases = 0;  // crashes in the middle of a record
  std::size_t torn_matches = 0;
  std::vector<std::string> failures;
};

/// Drives a durable replica through `updates` commits (a mix of local
/// updates and remote ones), then simulates a crash after every WAL record
/// and halfway through the next one. Each crash image is recovered and its
/// digest compared with the oracle of the records that were on disk.
CrashSweepResult crash_sweep(const std::filesystem::path& scratch, std::size_t updates, std::uint64_t seed);

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_CRASH_HPP_
