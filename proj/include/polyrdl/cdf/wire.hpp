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

#ifndef POLYRDL_CDF_WIRE_HPP_
#define POLYRDL_CDF_WIRE_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "polyrdl/core/types.hpp"

// Primitive encoding rules shared by every message: fixed-width big-endian
// integers, u32 length-prefixed strings and byte strings, u32 counted lists.

namespace polyrdl::cdf {

enum class DecodeErrc : std::uint8_t {
  kTruncated = 1,
  kTrailingBytes,
  kInvalidUtf8,
  kUnknownTag,
  kNonFiniteFloat,
  kBadMagic,
  kUnknownVersion,
  kUnknownMsgType,
  kOversize,
  kMalformedSync,
  kMalformed,  // structurally decodable but violates an invariant
};

std::string_view to_string(DecodeErrc c);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrc code, const std::string& what);
  DecodeErrc code() const noexcept { return code_; }

 private:
  DecodeErrc code_;
};

class Writer {
 public:
  Writer() = default;
  explicit Writer(Bytes& out) : out_(&out) {}

  void u8(std::uint8_t v) { out().push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(std::string_view s);
  void bytes(std::span<const std::uint8_t> b);
  void raw(std::span<const std::uint8_t> b);
  void count(std::size_t n);

  Bytes& out() { return out_ ? *out_ : own_; }
  Bytes take() { return std::move(out()); }

 private:
  Bytes own_;
  Bytes* out_ = nullptr;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();  // rejects NaN and infinities
  bool boolean();
  std::string str();  // validated UTF-8
  Bytes bytes();
  std::span<const std::uint8_t> raw(std::size_t n);
  /// List count, checked against the bytes left assuming each element
  /// occupies at least `min_elem_size` bytes.
  std::size_t count(std::size_t min_elem_size = 1);

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::string hex_encode(std::span<const std::uint8_t> b);
/// Ignores ASCII whitespace. Throws std::invalid_argument on bad digits.
Bytes hex_decode(std::string_view s);

}  // namespace polyrdl::cdf

#endif  // POLYRDL_CDF_WIRE_HPP_
