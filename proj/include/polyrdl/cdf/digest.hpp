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

#ifndef POLYRDL_CDF_DIGEST_HPP_
#define POLYRDL_CDF_DIGEST_HPP_

#include <array>
#include <cstdint>
#include <span>

namespace polyrdl::cdf {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

}  // namespace polyrdl::cdf

#endif  // POLYRDL_CDF_DIGEST_HPP_
