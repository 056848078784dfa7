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

#include "polyrdl/cdf/frame.hpp"

#include <algorithm>
#include <cstring>

#include "polyrdl/cdf/wire.hpp"

namespace polyrdl::cdf {

bool known_msg_type(std::uint8_t t) {
  switch (t) {
    case static_cast<std::uint8_t>(MsgType::kSync):
    case static_cast<std::uint8_t>(MsgType::kPluginEvent):
    case static_cast<std::uint8_t>(MsgType::kPluginCmd):
    case static_cast<std::uint8_t>(MsgType::kPluginErr):
    case static_cast<std::uint8_t>(MsgType::kPluginHello):
      return true;
    default:
      return false;
  }
}

Bytes encode_frame(MsgType type, std::span<const std::uint8_t> payload) {
  Bytes out;
  out.reserve(kFrameHeaderSize + payload.size());
  Writer w(out);
  w.raw(kFrameMagic);
  w.u8(kFrameVersion);
  w.u8(static_cast<std::uint8_t>(type));
  w.count(payload.size());
  w.raw(payload);
  return out;
}

std::optional<Frame> try_decode_frame(std::span<const std::uint8_t> in, std::size_t* consumed, std::uint32_t cap) {
  const std::size_t magic_seen = std::min<std::size_t>(in.size(), 4);
  if (magic_seen > 0 && std::memcmp(in.data(), kFrameMagic, magic_seen) != 0) throw DecodeError(DecodeErrc::kBadMagic, "bad frame magic");
  if (in.size() > 4 && in[4] != kFrameVersion) {
    throw DecodeError(DecodeErrc::kUnknownVersion, "frame version " + std::to_string(in[4]));
  }
  if (in.size() > 5 && !known_msg_type(in[5])) {
    throw DecodeError(DecodeErrc::kUnknownMsgType, "msg_type " + std::to_string(in[5]));
  }
  if (in.size() < kFrameHeaderSize) return std::nullopt;
  Reader header(in.subspan(6, 4));
  const std::uint32_t len = header.u32();
  if (len > cap) throw DecodeError(DecodeErrc::kOversize, "declared payload of " + std::to_string(len) + " bytes");
  if (in.size() - kFrameHeaderSize < len) return std::nullopt;
  Frame f;
  f.type = static_cast<MsgType>(in[5]);
  f.payload.assign(in.begin() + kFrameHeaderSize, in.begin() + kFrameHeaderSize + len);
  if (consumed) *consumed = kFrameHeaderSize + len;
  return f;
}

Frame decode_frame(std::span<const std::uint8_t>& stream, std::uint32_t cap) {
  std::size_t consumed = 0;
  auto f = try_decode_frame(stream, &consumed, cap);
  if (!f) throw DecodeError(DecodeErrc::kTruncated, "incomplete frame");
  stream = stream.subspan(consumed);
  return std::move(*f);
}

void FrameBuffer::feed(std::span<const std::uint8_t> data) {
  if (head_ > 0 && head_ >= buf_.size() / 2) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(head_));
    head_ = 0;
  }
  buf_.insert(buf_.end(), data.begin(), data.end());
}

std::optional<Frame> FrameBuffer::next() {
  if (head_ == buf_.size()) return std::nullopt;
  std::size_t consumed = 0;
  auto f = try_decode_frame(std::span<const std::uint8_t>(buf_).subspan(head_), &consumed, cap_);
  if (f) head_ += consumed;
  return f;
}

}  // namespace polyrdl::cdf
