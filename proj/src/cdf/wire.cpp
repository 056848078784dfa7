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

#include "polyrdl/cdf/wire.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace polyrdl::cdf {

std::string_view to_string(DecodeErrc c) {
  switch (c) {
    case DecodeErrc::kTruncated:
      return "TRUNCATED";
    case DecodeErrc::kTrailingBytes:
      return "TRAILING_BYTES";
    case DecodeErrc::kInvalidUtf8:
      return "INVALID_UTF8";
    case DecodeErrc::kUnknownTag:
      return "UNKNOWN_TAG";
    case DecodeErrc::kNonFiniteFloat:
      return "NON_FINITE_FLOAT";
    case DecodeErrc::kBadMagic:
      return "BAD_MAGIC";
    case DecodeErrc::kUnknownVersion:
      return "UNKNOWN_VERSION";
    case DecodeErrc::kUnknownMsgType:
      return "UNKNOWN_MSG_TYPE";
    case DecodeErrc::kOversize:
      return "OVERSIZE";
    case DecodeErrc::kMalformedSync:
      return "MALFORMED_SYNC";
    case DecodeErrc::kMalformed:
      return "MALFORMED";
  }
  return "?";
}

DecodeError::DecodeError(DecodeErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void Writer::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v >> 8));
  u8(static_cast<std::uint8_t>(v));
}

void Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(v >> shift));
}

void Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(v >> shift));
}

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::str(std::string_view s) {
  count(s.size());
  out().insert(out().end(), s.begin(), s.end());
}

void Writer::bytes(std::span<const std::uint8_t> b) {
  count(b.size());
  raw(b);
}

void Writer::raw(std::span<const std::uint8_t> b) { out().insert(out().end(), b.begin(), b.end()); }

void Writer::count(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("cdf: length exceeds u32");
  u32(static_cast<std::uint32_t>(n));
}

void Reader::need(std::size_t n) const {
  if (remaining() < n) {
    throw DecodeError(DecodeErrc::kTruncated,
                      "need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_));
  }
}

std::uint8_t Reader::u8() {
  need(1);
  return in_[pos_++];
}

std::uint16_t Reader::u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_ + i];
  pos_ += 8;
  return v;
}

double Reader::f64() {
  double v = std::bit_cast<double>(u64());
  if (!std::isfinite(v)) throw DecodeError(DecodeErrc::kNonFiniteFloat, "float scalar must be finite");
  return v;
}

bool Reader::boolean() {
  std::uint8_t b = u8();
  if (b > 1) throw DecodeError(DecodeErrc::kMalformed, "bool byte must be 0 or 1");
  return b == 1;
}

std::string Reader::str() {
  auto span = raw(u32());
  std::string s(span.begin(), span.end());
  if (!valid_utf8(s)) throw DecodeError(DecodeErrc::kInvalidUtf8, "string is not UTF-8");
  return s;
}

Bytes Reader::bytes() {
  auto span = raw(u32());
  return Bytes(span.begin(), span.end());
}

std::span<const std::uint8_t> Reader::raw(std::size_t n) {
  need(n);
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::size_t Reader::count(std::size_t min_elem_size) {
  std::size_t n = u32();
  if (min_elem_size > 0 && n > remaining() / min_elem_size) {
    throw DecodeError(DecodeErrc::kTruncated, "list count " + std::to_string(n) + " exceeds the bytes left");
  }
  return n;
}

void Reader::expect_done() const {
  if (!done()) {
    throw DecodeError(DecodeErrc::kTrailingBytes, std::to_string(remaining()) + " bytes after the value");
  }
}

std::string hex_encode(std::span<const std::uint8_t> b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto c : b) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xF]);
  }
  return out;
}

Bytes hex_decode(std::string_view s) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  int hi = -1;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    int v = nibble(c);
    if (v < 0) throw std::invalid_argument("hex: bad digit");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>((hi << 4) | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw std::invalid_argument("hex: odd digit count");
  return out;
}

}  // namespace polyrdl::cdf
