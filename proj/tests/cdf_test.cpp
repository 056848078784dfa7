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

#include <gtest/gtest.h>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/replica.hpp"
#include "polyrdl/harness/generators.hpp"

namespace polyrdl::cdf {
namespace {

using harness::Rng;

DecodeErrc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DecodeError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no DecodeError thrown";
  return DecodeErrc::kMalformed;
}

Update counter_update() {
  Update u;
  u.id = {"A", 1};
  u.lamport = 1;
  u.object_id = "c";
  u.object_type = ObjectType::kCounter;
  u.op = op::CounterAdd{-1};
  return u;
}

TEST(WireTest, U64IsBigEndian) {
  Writer w;
  w.u64(5);
  EXPECT_EQ(w.take(), (Bytes{0, 0, 0, 0, 0, 0, 0, 5}));
}

TEST(WireTest, I64TwosComplement) {
  Writer w;
  w.i64(-2);
  EXPECT_EQ(hex_encode(w.take()), "fffffffffffffffe");
}

TEST(WireTest, StringsArePrefixed) {
  Writer w;
  w.str("hi");
  EXPECT_EQ(hex_encode(w.take()), "000000026869");
}

TEST(WireTest, RejectsBadUtf8) {
  Bytes b = {0, 0, 0, 2, 0xc3, 0x28};
  EXPECT_EQ(code_of([&] {
              Reader r(b);
              r.str();
            }),
            DecodeErrc::kInvalidUtf8);
}

TEST(WireTest, RejectsNonFiniteFloat) {
  Bytes b = {0x7f, 0xf8, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(code_of([&] {
              Reader r(b);
              r.f64();
            }),
            DecodeErrc::kNonFiniteFloat);
}

TEST(WireTest, HexRoundTrip) {
  Bytes b = {0x00, 0xab, 0xff};
  EXPECT_EQ(hex_encode(b), "00abff");
  EXPECT_EQ(hex_decode("00 AB\nff"), b);
}

TEST(CodecTest, CounterAddLayout) {
  EXPECT_EQ(hex_encode(encode_update(counter_update())),
            "00000001"
            "41"
            "0000000000000001"
            "0000000000000001"
            "0000000000000000"
            "00000001"
            "63"
            "01"
            "01"
            "ffffffffffffffff");
}

TEST(CodecTest, TruncationDetected) {
  Bytes b = encode_update(counter_update());
  b.pop_back();
  EXPECT_EQ(code_of([&] { decode_update(b); }), DecodeErrc::kTruncated);
}

TEST(CodecTest, TrailingBytesDetected) {
  Bytes b = encode_update(counter_update());
  b.push_back(0);
  EXPECT_EQ(code_of([&] { decode_update(b); }), DecodeErrc::kTrailingBytes);
}

TEST(CodecTest, UnknownOpKind) {
  Bytes b = encode_update(counter_update());
  b[b.size() - 9] = 0x02;
  EXPECT_EQ(code_of([&] { decode_update(b); }), DecodeErrc::kUnknownTag);
}

TEST(CodecTest, UnknownScalarTag) {
  Update u = counter_update();
  u.object_type = ObjectType::kMap;
  u.op = op::MapPut{"k", std::int64_t{1}};
  Bytes b = encode_update(u);
  b[b.size() - 9] = 0x06;
  EXPECT_EQ(code_of([&] { decode_update(b); }), DecodeErrc::kUnknownTag);
}

TEST(CodecTest, UpdateRoundTripProperty) {
  Rng rng(20260101);
  for (int i = 0; i < 10000; ++i) {
    const Update u = harness::random_update(rng);
    const Bytes b = encode_update(u);
    const Update back = decode_update(b);
    ASSERT_EQ(back, u) << "case " << i;
    ASSERT_EQ(encode_update(back), b) << "case " << i;
  }
}

TEST(CodecTest, SyncRoundTripProperty) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const SyncMessage m = harness::random_sync(rng);
    const Bytes b = encode_sync(m);
    ASSERT_EQ(decode_sync(b), m) << "case " << i;
  }
}

TEST(CodecTest, EmptySync) {
  SyncMessage m;
  m.sender = "A";
  const SyncMessage back = decode_sync(encode_sync(m));
  EXPECT_TRUE(back.updates.empty());
  EXPECT_TRUE(back.version_vector.empty());
}

TEST(CodecTest, UnsortedSyncRejected) {
  SyncMessage m;
  m.sender = "A";
  Update a = counter_update();
  Update b = counter_update();
  b.id.seq = 2;
  m.updates = {b, a};
  EXPECT_EQ(code_of([&] { decode_sync(encode_sync(m)); }), DecodeErrc::kMalformedSync);
  m.updates = {a, a};
  EXPECT_EQ(code_of([&] { decode_sync(encode_sync(m)); }), DecodeErrc::kMalformedSync);
}

TEST(CodecTest, PluginPayloadsRoundTrip) {
  PluginHello h{"logging", 3};
  EXPECT_EQ(decode_hello(encode_hello(h)), h);
  PluginEvent e{9, 4, "update", "A", counter_update(), {1, 2}};
  EXPECT_EQ(decode_event(encode_event(e)), e);
  e.update.reset();
  EXPECT_EQ(decode_event(encode_event(e)), e);
  PluginCommand c{5, "access", {0, 0, 0, 1, 'c', 1}};
  EXPECT_EQ(decode_command(encode_command(c)), c);
  PluginError err{5, 1, "denied"};
  EXPECT_EQ(decode_error(encode_error(err)), err);
}

TEST(CodecTest, ViewRoundTrip) {
  ValueView views[] = {
      AbsentView{},
      CounterValue{-4},
      SetValue{{to_bytes("a"), to_bytes("b")}},
      MapValue{{{"a", CounterValue{1}}, {"b", SetValue{{to_bytes("x")}}}, {"c", RegisterValue{2.5}}}},
  };
  for (const auto& v : views) EXPECT_EQ(decode_view(encode_view(v)), v);
}

TEST(StateCodecTest, EmptyStoreIsFourZeroBytes) { EXPECT_EQ(encode_state({}), (Bytes{0, 0, 0, 0})); }

TEST(StateCodecTest, DecodeReencodes) {
  Rng rng(3);
  harness::PoolOptions opt;
  opt.mixed = {"x"};
  for (int i = 0; i < 300; ++i) {
    Replica r("R");
    for (const auto& u : harness::random_pool(rng, 12, opt)) r.apply_update(u);
    const Bytes b = r.encode_state();
    ASSERT_EQ(encode_state(decode_state(b)), b);
  }
}

TEST(StateCodecTest, RejectsUnsortedObjects) {
  Replica r("R");
  r.local_update("b", ObjectType::kCounter, op::CounterAdd{1});
  r.local_update("a", ObjectType::kCounter, op::CounterAdd{1});
  Bytes b = r.encode_state();
  // Swap the one-byte object ids.
  auto ia = std::find(b.begin() + 4, b.end(), 'a');
  auto ib = std::find(b.begin() + 4, b.end(), 'b');
  std::iter_swap(ia, ib);
  EXPECT_THROW(decode_state(b), DecodeError);
}

TEST(FrameTest, EmptySyncFrameBytes) {
  EXPECT_EQ(hex_encode(encode_frame(MsgType::kSync, {})), "48524d31010100000000");
}

TEST(FrameTest, TwoFramesNoResidue) {
  Bytes stream = encode_frame(MsgType::kSync, Bytes{1, 2});
  Bytes second = encode_frame(MsgType::kPluginHello, Bytes{3});
  stream.insert(stream.end(), second.begin(), second.end());
  std::span<const std::uint8_t> in(stream);
  Frame f1 = decode_frame(in);
  Frame f2 = decode_frame(in);
  EXPECT_EQ(f1.type, MsgType::kSync);
  EXPECT_EQ(f1.payload, (Bytes{1, 2}));
  EXPECT_EQ(f2.type, MsgType::kPluginHello);
  EXPECT_TRUE(in.empty());
}

TEST(FrameTest, HeaderErrors) {
  Bytes bad = hex_decode("58585858010100000000");
  EXPECT_EQ(code_of([&] {
              std::span<const std::uint8_t> in(bad);
              decode_frame(in);
            }),
            DecodeErrc::kBadMagic);
  Bytes version = hex_decode("48524d31020100000000");
  EXPECT_EQ(code_of([&] {
              std::span<const std::uint8_t> in(version);
              decode_frame(in);
            }),
            DecodeErrc::kUnknownVersion);
  Bytes type = hex_decode("48524d31017700000000");
  EXPECT_EQ(code_of([&] {
              std::span<const std::uint8_t> in(type);
              decode_frame(in);
            }),
            DecodeErrc::kUnknownMsgType);
  Bytes big = hex_decode("48524d310101ffffffff");
  EXPECT_EQ(code_of([&] {
              std::span<const std::uint8_t> in(big);
              decode_frame(in);
            }),
            DecodeErrc::kOversize);
}

TEST(FrameTest, BufferReassemblesBytewise) {
  Bytes stream;
  for (int i = 0; i < 5; ++i) {
    Bytes f = encode_frame(MsgType::kPluginEvent, Bytes(static_cast<std::size_t>(i * 3), 0xaa));
    stream.insert(stream.end(), f.begin(), f.end());
  }
  FrameBuffer buf;
  int frames = 0;
  for (std::uint8_t byte : stream) {
    buf.feed(std::span<const std::uint8_t>(&byte, 1));
    while (auto f = buf.next()) {
      EXPECT_EQ(f->payload.size(), static_cast<std::size_t>(frames * 3));
      ++frames;
    }
  }
  EXPECT_EQ(frames, 5);
}

TEST(FrameTest, BadMagicSeenEarly) {
  FrameBuffer buf;
  Bytes b = {'H', 'X'};
  buf.feed(b);
  EXPECT_THROW(buf.next(), DecodeError);
}

TEST(FuzzTest, RandomBytesGiveTypedErrors) {
  Rng rng(99);
  std::uniform_int_distribution<int> len(0, 64);
  std::uniform_int_distribution<int> byte(0, 255);
  int decoded = 0;
  for (int i = 0; i < 20000; ++i) {
    Bytes b(static_cast<std::size_t>(len(rng)));
    for (auto& x : b) x = static_cast<std::uint8_t>(byte(rng));
    try {
      decode_update(b);
      ++decoded;
    } catch (const DecodeError&) {
    }
    try {
      decode_sync(b);
    } catch (const DecodeError&) {
    }
    try {
      decode_state(b);
    } catch (const DecodeError&) {
    }
    try {
      std::span<const std::uint8_t> in(b);
      decode_frame(in);
    } catch (const DecodeError&) {
    }
  }
  SUCCEED() << decoded << " random strings decoded as updates";
}

TEST(FuzzTest, MutatedUpdatesGiveTypedErrors) {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    Bytes b = encode_update(harness::random_update(rng));
    b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      const Update u = decode_update(b);
      EXPECT_EQ(encode_update(u), b);
    } catch (const DecodeError&) {
    }
  }
}

}  // namespace
}  // namespace polyrdl::cdf
