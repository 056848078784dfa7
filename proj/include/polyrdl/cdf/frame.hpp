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

#ifndef POLYRDL_CDF_FRAME_HPP_
#define POLYRDL_CDF_FRAME_HPP_

#include <cstdint>
#include <optional>
#include <span>

#include "polyrdl/core/types.hpp"

namespace polyrdl::cdf {

// "HRM1" | version (1) | msg_type | payload_len (u32 BE) | payload
inline constexpr std::uint8_t kFrameMagic[4] = {'H', 'R', 'M', '1'};
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 10;
inline constexpr std::uint32_t kDefaultFrameCap = 64u << 20;

enum class MsgType : std::uint8_t {
  kSync = 0x01,
  kPluginEvent = 0x10,
  kPluginCmd = 0x11,
  kPluginErr = 0x12,
  kPluginHello = 0x13,
};

bool known_msg_type(std::uint8_t t);

struct Frame {
  MsgType type = MsgType::kSync;
  Bytes payload;
  friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes encode_frame(MsgType type, std::span<const std::uint8_t> payload);

/// Decodes one frame from the front of `in`. Returns nullopt when more bytes
/// are needed; header problems throw as soon as the offending byte is
/// visible. On success `*consumed` is the frame's total size.
std::optional<Frame> try_decode_frame(std::span<const std::uint8_t> in, std::size_t* consumed,
                                      std::uint32_t cap = kDefaultFrameCap);

/// Decodes one frame and advances `stream` past it. Incomplete input throws
/// kTruncated.
Frame decode_frame(std::span<const std::uint8_t>& stream, std::uint32_t cap = kDefaultFrameCap);

/// Accumulates bytes from a socket and yields whole frames.
class FrameBuffer {
 public:
  explicit FrameBuffer(std::uint32_t cap = kDefaultFrameCap) : cap_(cap) {}
  void feed(std::span<const std::uint8_t> data);
  std::optional<Frame> next();
  std::size_t buffered() const { return buf_.size() - head_; }

 private:
  Bytes buf_;
  std::size_t head_ = 0;
  std::uint32_t cap_;
};

}  // namespace polyrdl::cdf

#endif  // POLYRDL_CDF_FRAME_HPP_
