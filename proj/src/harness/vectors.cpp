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

#include "polyrdl/harness/vectors.hpp"

#include <fstream>
#include <map>
#include <random>
#include <nlohmann/json.hpp>
#include <sstream>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/digest.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/replica.hpp"
#include "polyrdl/harness/exhaustive.hpp"
#include "polyrdl/harness/oracle.hpp"
#include "polyrdl/plugin/protocol.hpp"

namespace polyrdl::harness {

namespace {

namespace fs = std::filesystem;
using cdf::MsgType;

Update make(std::string rid, std::uint64_t seq, std::uint64_t lamport, std::string obj, ObjectType type, OpPayload op,
            std::uint64_t epoch = 0) {
  Update u;
  u.id = {std::move(rid), seq};
  u.lamport = lamport;
  u.epoch = epoch;
  u.object_id = std::move(obj);
  u.object_type = type;
  u.op = std::move(op);
  return u;
}

Bytes state_after(const std::vector<Update>& ups) {
  Replica r("R");
  for (const auto& u : ups) r.apply_update(u);
  return r.encode_state();
}

cdf::SyncMessage sync_of(std::string sender, std::vector<Update> ups) {
  cdf::SyncMessage m;
  m.sender = std::move(sender);
  std::sort(ups.begin(), ups.end(), [](const Update& a, const Update& b) { return a.id < b.id; });
  VersionVector vv;
  for (const auto& u : ups) {
    vv.add(u.id);
    m.sender_epoch = std::max(m.sender_epoch, u.epoch);
  }
  m.version_vector = vv.entries();
  m.updates = std::move(ups);
  return m;
}

GoldenVector sync_vector(std::string name, std::string what, cdf::SyncMessage m) {
  GoldenVector v{std::move(name), std::move(what), cdf::encode_frame(MsgType::kSync, cdf::encode_sync(m)), {}};
  v.state = state_after(m.updates);
  return v;
}

GoldenVector plain(std::string name, std::string what, MsgType t, Bytes payload) {
  return {std::move(name), std::move(what), cdf::encode_frame(t, payload), std::nullopt};
}

constexpr auto C = ObjectType::kCounter;
constexpr auto S = ObjectType::kSet;
constexpr auto M = ObjectType::kMap;

std::string hex_lines(const Bytes& b) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); i += 32) {
    const std::size_t n = std::min<std::size_t>(32, b.size() - i);
    out += cdf::hex_encode(std::span<const std::uint8_t>(b.data() + i, n));
    out += '\n';
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Bytes reencode_payload(MsgType t, const Bytes& p) {
  switch (t) {
    case MsgType::kSync: return cdf::encode_sync(cdf::decode_sync(p));
    case MsgType::kPluginEvent: return cdf::encode_event(cdf::decode_event(p));
    case MsgType::kPluginErr: return cdf::encode_error(cdf::decode_error(p));
    case MsgType::kPluginHello: return cdf::encode_hello(cdf::decode_hello(p));
    case MsgType::kPluginCmd: {
      cdf::PluginCommand c = cdf::decode_command(p);
      // Arguments of the core functions have fixed layouts of their own.
      if (c.core_function == "access") c.args = plugin::encode_access_args(plugin::decode_access_args(c.args));
      if (c.core_function == "update") c.args = plugin::encode_update_args(plugin::decode_update_args(c.args));
      if (c.core_function == "merge") c.args = cdf::encode_sync(cdf::decode_sync(c.args));
      return cdf::encode_command(c);
    }
  }
  return p;
}

}  // namespace

Bytes reencode_frame(const Bytes& frame) {
  std::span<const std::uint8_t> in(frame);
  const cdf::Frame f = cdf::decode_frame(in);
  if (!in.empty()) throw cdf::DecodeError(cdf::DecodeErrc::kTrailingBytes, "bytes after the frame");
  return cdf::encode_frame(f.type, reencode_payload(f.type, f.payload));
}

std::vector<GoldenVector> golden_vectors() {
  std::vector<GoldenVector> v;
  const Bytes x = to_bytes("x");
  const Bytes y = to_bytes("y");

  v.push_back(sync_vector("sync_empty", "no updates, empty version vector", sync_of("A", {})));
  v.push_back(sync_vector("counter_add", "one CounterAdd", sync_of("A", {make("A", 1, 1, "c", C, op::CounterAdd{5})})));
  v.push_back(sync_vector("counter_extremes", "deltas at both ends of int64",
                          sync_of("A", {make("A", 1, 1, "c", C, op::CounterAdd{INT64_MAX}),
                                        make("A", 2, 2, "c", C, op::CounterAdd{INT64_MIN}),
                                        make("A", 3, 3, "c", C, op::CounterAdd{-1})})));
  v.push_back(sync_vector("set_add", "one SetAdd", sync_of("A", {make("A", 1, 1, "s", S, op::SetAdd{x})})));
  v.push_back(sync_vector("set_remove", "add then observed remove",
                          sync_of("A", {make("A", 1, 1, "s", S, op::SetAdd{x}),
                                        make("A", 2, 2, "s", S, op::SetRemove{x, {{"A", 1}}})})));
  v.push_back(sync_vector("set_remove_unseen", "remove naming a tag the receiver never saw",
                          sync_of("B", {make("B", 1, 4, "s", S, op::SetRemove{y, {{"A", 9}}})})));
  v.push_back(sync_vector("set_add_wins", "concurrent add survives a remove of other tags",
                          sync_of("C", {make("A", 1, 1, "s", S, op::SetAdd{x}), make("B", 1, 1, "s", S, op::SetAdd{x}),
                                        make("C", 1, 2, "s", S, op::SetRemove{x, {{"A", 1}}})})));
  v.push_back(sync_vector("map_put_int", "register, int scalar",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapPut{"k", std::int64_t{-42}})})));
  v.push_back(sync_vector("map_put_float", "register, float scalar",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapPut{"k", 0.1})})));
  v.push_back(sync_vector("map_put_bool", "register, bool scalar",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapPut{"k", true})})));
  v.push_back(sync_vector("map_put_string", "register, UTF-8 string scalar",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapPut{"k", std::string("h\xc3\xa9llo")})})));
  v.push_back(sync_vector("map_put_bytes", "register, bytes scalar",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapPut{"k", Bytes{0x00, 0xff, 0x10}})})));
  v.push_back(sync_vector("map_register_lww", "two puts, the greater stamp wins",
                          sync_of("B", {make("A", 1, 3, "m", M, op::MapPut{"k", std::int64_t{1}}),
                                        make("B", 1, 3, "m", M, op::MapPut{"k", std::int64_t{2}})})));
  v.push_back(sync_vector("map_remove_key", "put then key removal",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapPut{"k", false}),
                                        make("A", 2, 2, "m", M, op::MapRemoveKey{"k"})})));
  v.push_back(sync_vector("map_counter_add", "nested counter",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapCounterAdd{"n", 7}),
                                        make("A", 2, 2, "m", M, op::MapCounterAdd{"n", -2})})));
  v.push_back(sync_vector("map_set_add", "nested set add",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapSetAdd{"t", x})})));
  v.push_back(sync_vector("map_set_remove", "nested set add and remove",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapSetAdd{"t", x}),
                                        make("A", 2, 2, "m", M, op::MapSetAdd{"t", y}),
                                        make("A", 3, 3, "m", M, op::MapSetRemove{"t", x, {{"A", 1}}})})));
  v.push_back(sync_vector("map_tombstone_triple", "put, remove key, then a newer counter add under the key",
                          sync_of("A", {make("A", 1, 5, "m", M, op::MapPut{"k", std::int64_t{1}}),
                                        make("B", 1, 7, "m", M, op::MapRemoveKey{"k"}),
                                        make("A", 2, 9, "m", M, op::MapCounterAdd{"k", 3})})));
  v.push_back(sync_vector("map_type_conflict", "register and set under one key; the newer type wins",
                          sync_of("A", {make("A", 1, 1, "m", M, op::MapSetAdd{"k", x}),
                                        make("B", 1, 2, "m", M, op::MapPut{"k", 1.5})})));
  {
    Replica p("P");
    p.local_update("c", C, op::CounterAdd{10});
    p.local_update("s", S, op::SetAdd{y});
    const Bytes snap = p.encode_state();
    v.push_back(sync_vector("reset", "Reset carrying a snapshot",
                            sync_of("P", {make("P", 1, 4, "", C, op::Reset{1, snap}, 1)})));
    v.push_back(sync_vector("reset_with_stragglers", "Reset, an older-epoch straggler and a same-epoch update",
                            sync_of("A", {make("A", 1, 2, "c", C, op::CounterAdd{100}),
                                          make("P", 1, 4, "", C, op::Reset{1, snap}, 1),
                                          make("B", 1, 5, "c", C, op::CounterAdd{1}, 1)})));
    v.push_back(sync_vector("reset_empty_snapshot", "Reset to the empty state",
                            sync_of("Q", {make("Q", 1, 1, "", C, op::Reset{1, Bytes{0, 0, 0, 0}}, 1)})));
  }
  v.push_back(sync_vector("pool_counter", "hand-built counter pool", sync_of("A", counter_candidates())));
  v.push_back(sync_vector("pool_set", "hand-built set pool", sync_of("B", set_candidates())));
  v.push_back(sync_vector("pool_map", "hand-built map pool", sync_of("C", map_candidates())));
  v.push_back(sync_vector("pool_mixed", "all three types and an epoch change", sync_of("A", mixed_candidates())));
  v.push_back(sync_vector("pool_combined", "three objects, nine replicas", sync_of("A", combined_candidates())));

  // Plug-in protocol.
  const Update u = make("A", 3, 8, "c", C, op::CounterAdd{-5});
  v.push_back(plain("hello", "host greeting", MsgType::kPluginHello, cdf::encode_hello({"logging", 1})));
  v.push_back(plain("hello_versioned", "plug-in greeting, schema version 7", MsgType::kPluginHello,
                    cdf::encode_hello({"undo", 7})));
  v.push_back(plain("event_update", "local update with before and after views", MsgType::kPluginEvent,
                    cdf::encode_event({1, 0, "update", "A", u,
                                       plugin::encode_change({CounterValue{5}, CounterValue{0}})})));
  v.push_back(plain("event_merge", "merged remote update, map views", MsgType::kPluginEvent,
                    cdf::encode_event({2, 0, "merge", "B", make("A", 1, 1, "m", M, op::MapSetAdd{"t", x}),
                                       plugin::encode_change({AbsentView{}, MapValue{{{"t", SetValue{{x}}}}}})})));
  v.push_back(plain("event_sync", "sync statistics, no update", MsgType::kPluginEvent,
                    cdf::encode_event({3, 0, "sync", "A", std::nullopt, plugin::encode_sync_stats({12, 900, 0})})));
  v.push_back(plain("event_access_reply", "reply to an access command", MsgType::kPluginEvent,
                    cdf::encode_event({4, 9, "access", "A", std::nullopt,
                                       cdf::encode_view(MapValue{{{"k", RegisterValue{std::string("v")}},
                                                                  {"n", CounterValue{3}}}})})));
  {
    plugin::SnapshotReply snap{1, 14, {{"A", 3}, {"B", 2}}, state_after({u})};
    v.push_back(plain("event_snapshot_reply", "full snapshot reply", MsgType::kPluginEvent,
                      cdf::encode_event({5, 10, "access", "A", std::nullopt, plugin::encode_snapshot_reply(snap)})));
  }
  v.push_back(plain("cmd_access", "access command", MsgType::kPluginCmd,
                    cdf::encode_command({1, "access", plugin::encode_access_args({"c", ObjectType::kCounter})})));
  v.push_back(plain("cmd_access_snapshot", "access command for the whole state", MsgType::kPluginCmd,
                    cdf::encode_command({2, "access", plugin::encode_access_args({"", std::nullopt})})));
  v.push_back(plain("cmd_update", "update command", MsgType::kPluginCmd,
                    cdf::encode_command(
                        {3, "update", plugin::encode_update_args({"s", S, op::SetRemove{x, {{"A", 1}, {"B", 4}}}})})));
  v.push_back(plain("cmd_sync", "sync command, no arguments", MsgType::kPluginCmd, cdf::encode_command({4, "sync", {}})));
  v.push_back(plain("cmd_merge", "merge command carrying a sync message", MsgType::kPluginCmd,
                    cdf::encode_command({5, "merge", cdf::encode_sync(sync_of("Z", {make("Z", 1, 1, "c", C, op::CounterAdd{2})}))})));
  v.push_back(plain("err_permission", "permission denied", MsgType::kPluginErr,
                    cdf::encode_error({3, plugin::kPermissionDenied, "update not permitted"})));
  v.push_back(plain("err_core", "core error passed through", MsgType::kPluginErr,
                    cdf::encode_error({6, static_cast<std::uint16_t>(plugin::kCoreErrorBase + 2), "type mismatch"})));
  return v;
}

void write_vectors(const fs::path& dir, const std::vector<GoldenVector>& vectors) {
  fs::create_directories(dir);
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& g = vectors[i];
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i + 1);
    const std::string file = prefix + g.name + ".hex";
    std::ofstream(dir / file, std::ios::binary) << hex_lines(g.frame);
    nlohmann::json e = {{"file", file}, {"msg_type", static_cast<int>(g.frame.at(5))}, {"description", g.description},
                      {"frame_sha256", cdf::hex_encode(cdf::sha256(g.frame))}};
    if (g.state) {
      e["state"] = cdf::hex_encode(*g.state);
      e["digest"] = cdf::hex_encode(cdf::sha256(*g.state));
    }
    list.push_back(std::move(e));
  }
  nlohmann::json manifest = {
      {"format", 1},
      {"note", "one frame per .hex file; state and digest are what a fresh replica holds after applying the "
               "SYNC updates in message order"},
      {"vectors", list}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

std::vector<VectorCheck> check_vectors(const fs::path& dir) {
  std::vector<VectorCheck> out;
  const nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  for (const auto& e : manifest.at("vectors")) {
    VectorCheck c{e.at("file").get<std::string>(), false, {}};
    try {
      const Bytes frame = cdf::hex_decode(read_file(dir / c.file));
      if (cdf::hex_encode(cdf::sha256(frame)) != e.at("frame_sha256").get<std::string>()) {
        c.detail = "frame hash differs from the manifest";
      } else if (reencode_frame(frame) != frame) {
        c.detail = "re-encoding differs";
      } else if (static_cast<int>(frame.at(5)) != e.at("msg_type").get<int>()) {
        c.detail = "message type differs from the manifest";
      } else if (e.contains("state")) {
        std::span<const std::uint8_t> in(frame);
        const cdf::SyncMessage m = cdf::decode_sync(cdf::decode_frame(in).payload);
        const Bytes state = state_after(m.updates);
        if (cdf::hex_encode(state) != e.at("state").get<std::string>()) {
          c.detail = "state differs from the manifest";
        } else if (cdf::hex_encode(cdf::sha256(state)) != e.at("digest").get<std::string>()) {
          c.detail = "digest differs from the manifest";
        } else if (cdf::encode_state(cdf::decode_state(state)) != state) {
          c.detail = "state does not re-encode";
        } else {
          c.ok = true;
        }
      } else {
        c.ok = true;
      }
    } catch (const std::exception& ex) {
      c.detail = ex.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

VectorCoverage vector_coverage(const fs::path& dir) {
  VectorCoverage cov;
  auto note = [&](const Update& u) {
    cov.op_kinds.insert(op_kind(u.op));
    if (const auto* put = std::get_if<op::MapPut>(&u.op)) cov.scalar_tags.insert(scalar_tag(put->value));
  };
  const nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  for (const auto& e : manifest.at("vectors")) {
    const std::string file = e.at("file").get<std::string>();
    const Bytes bytes = cdf::hex_decode(read_file(dir / file));
    std::span<const std::uint8_t> in(bytes);
    const cdf::Frame f = cdf::decode_frame(in);
    ++cov.frames;
    cov.msg_types.insert(f.type);
    if (f.type == MsgType::kSync) {
      const cdf::SyncMessage m = cdf::decode_sync(f.payload);
      for (const auto& u : m.updates) note(u);
      if (e.contains("state") && cdf::hex_encode(oracle_fold(m.updates)) != e.at("state").get<std::string>()) {
        cov.oracle_mismatches.push_back(file);
      }
    } else if (f.type == MsgType::kPluginEvent) {
      const cdf::PluginEvent ev = cdf::decode_event(f.payload);
      if (ev.update) note(*ev.update);
    }
  }
  return cov;
}

FuzzResult fuzz_decoders(const std::vector<GoldenVector>& seeds, std::size_t cases, std::uint64_t seed) {
  FuzzResult res;
  std::mt19937_64 rng(seed);
  auto input = [&]() -> Bytes {
    Bytes b;
    if (seeds.empty() || rng() % 2 == 0) {
      b.resize(rng() % 97);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      // Often give it a valid frame header so the payload decoders see it.
      if (rng() % 2 == 0 && b.size() >= 10) {
        static constexpr std::uint8_t kTypes[] = {0x01, 0x10, 0x11, 0x12, 0x13};
        const Bytes head = {'H', 'R', 'M', '1', 1, kTypes[rng() % 5]};
        std::copy(head.begin(), head.end(), b.begin());
        const std::uint32_t len = static_cast<std::uint32_t>(b.size() - 10);
        for (int i = 0; i < 4; ++i) b[6 + i] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
      }
      return b;
    }
    b = seeds[rng() % seeds.size()].frame;
    switch (rng() % 3) {
      case 0:
        for (int n = 1 + static_cast<int>(rng() % 3); n > 0; --n) {
          b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        }
        break;
      case 1:
        b.resize(rng() % b.size());
        break;
      default:
        for (int n = 1 + static_cast<int>(rng() % 4); n > 0; --n) b.push_back(static_cast<std::uint8_t>(rng()));
    }
    return b;
  };
  auto probe = [&](const Bytes& b, const char* what, auto&& decode_reencode) {
    try {
      if (decode_reencode() == b) {
        ++res.accepted;
      } else {
        ++res.untyped;
        if (res.first_untyped.empty()) res.first_untyped = std::string(what) + " re-encodes differently: " + cdf::hex_encode(b);
      }
      return false;
    } catch (const cdf::DecodeError&) {
      return true;
    } catch (const std::exception& ex) {
      ++res.untyped;
      if (res.first_untyped.empty()) res.first_untyped = std::string(what) + ": " + ex.what() + " on " + cdf::hex_encode(b);
      return false;
    }
  };
  for (std::size_t i = 0; i < cases; ++i) {
    const Bytes b = input();
    bool typed = false;
    typed |= probe(b, "frame", [&] { return reencode_frame(b); });
    typed |= probe(b, "update", [&] { return cdf::encode_update(cdf::decode_update(b)); });
    typed |= probe(b, "state", [&] { return cdf::encode_state(cdf::decode_state(b)); });
    typed |= probe(b, "view", [&] { return cdf::encode_view(cdf::decode_view(b)); });
    ++res.cases;
    if (typed) ++res.typed_errors;
  }
  return res;
}

}  // namespace polyrdl::harness
