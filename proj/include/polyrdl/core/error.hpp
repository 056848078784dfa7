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

#ifndef POLYRDL_CORE_ERROR_HPP_
#define POLYRDL_CORE_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polyrdl {

enum class Errc : std::uint16_t {
  kInvalidArgument = 1,
  kTypeMismatch = 2,     // op kind not legal for the object type
  kMalformedUpdate = 3,  // well-typed bytes carrying an invalid update
  kDuplicateReplica = 4,
  kResetNotAllowed = 5,
  kIo = 6,
  kCorruption = 7,
  kUnrecoverable = 8,
  kDuplicateLabel = 9,
  kUnknownCheckpoint = 10,
  kHalted = 11,
};

std::string_view to_string(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace polyrdl

#endif  // POLYRDL_CORE_ERROR_HPP_
