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

#include "polyrdl/harness/generators.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "polyrdl/core/replica.hpp"

namespace polyrdl::harness {

namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::uint64_t below(Rng& rng, std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); }

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Mostly ASCII, sometimes multi-byte code points.
std::string random_text(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> kPieces = {"a", "b", "k", "z", "0", "-", "_", " ", "\xc3\xa9", "\xe2\x82\xac",
                                                   "\xf0\x9f\x98\x80"};
  std::string s;
  const std::size_t n = below(rng, max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += pick(rng, kPieces);
  return s;
}

std::string random_replica_id(Rng& rng) {
  std::string s = random_text(rng, 6);
  if (s.empty()) s = "r";
  while (s.size() > kMaxReplicaIdLen) s.pop_back();
  return valid_utf8(s) ? s : "r";
}

Bytes random_blob(Rng& rng, std::size_t max_len) {
  Bytes b(below(rng, max_len + 1));
  for (auto& x : b) x = static_cast<std::uint8_t>(below(rng, 256));
  return b;
}

std::int64_t random_i64(Rng& rng) {
  switch (below(rng, 4)) {
    case 0:
      return std::numeric_limits<std::int64_t>::min();
    case 1:
      return std::numeric_limits<std::int64_t>::max();
    case 2:
      return static_cast<std::int64_t>(below(rng, 21)) - 10;
    default:
      return static_cast<std::int64_t>(rng());
  }
}

std::vector<UpdateId> random_tags(Rng& rng) {
  std::vector<UpdateId> tags(below(rng, 4));
  for (auto& t : tags) t = UpdateId{random_replica_id(rng), 1 + below(rng, 1000)};
  return tags;
}

Bytes random_snapshot(Rng& rng) {
  Replica r("snap");
  PoolOptions opt;
  // Own origins, so snapshot records never share a stamp with pool updates.
  opt.replicas = {"P", "Q"};
  opt.mixed = {"x"};
  for (const auto& u : random_pool(rng, below(rng, 8), opt)) r.apply_update(u);
  return r.encode_state();
}

}  // namespace

Scalar random_scalar(Rng& rng) {
  switch (below(rng, 5)) {
    case 0:
      return random_i64(rng);
    case 1: {
      double d = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
      if (chance(rng, 0.1)) d = -0.0;
      return d;
    }
    case 2:
      return chance(rng, 0.5);
    case 3:
      return random_text(rng, 8);
    default:
      return random_blob(rng, 8);
  }
}

Update random_update(Rng& rng) {
  Update u;
  u.id = UpdateId{random_replica_id(rng), 1 + below(rng, 1u << 20)};
  u.lamport = chance(rng, 0.05) ? std::numeric_limits<std::uint64_t>::max() : 1 + below(rng, 1u << 20);
  u.epoch = below(rng, 4);
  u.object_id = random_text(rng, 10);
  const std::string key = random_text(rng, 6);
  switch (below(rng, 9)) {
    case 0:
      u.object_type = ObjectType::kCounter;
      u.op = op::CounterAdd{random_i64(rng)};
      break;
    case 1:
      u.object_type = ObjectType::kSet;
      u.op = op::SetAdd{random_blob(rng, 6)};
      break;
    case 2:
      u.object_type = ObjectType::kSet;
      u.op = op::SetRemove{random_blob(rng, 6), random_tags(rng)};
      break;
    case 3:
      u.object_type = ObjectType::kMap;
      u.op = op::MapPut{key, random_scalar(rng)};
      break;
    case 4:
      u.object_type = ObjectType::kMap;
      u.op = op::MapRemoveKey{key};
      break;
    case 5:
      u.object_type = ObjectType::kMap;
      u.op = op::MapCounterAdd{key, random_i64(rng)};
      break;
    case 6:
      u.object_type = ObjectType::kMap;
      u.op = op::MapSetAdd{key, random_blob(rng, 6)};
      break;
    case 7:
      u.object_type = ObjectType::kMap;
      u.op = op::MapSetRemove{key, random_blob(rng, 6), random_tags(rng)};
      break;
    default:
      u.object_type = static_cast<ObjectType>(1 + below(rng, 3));
      u.epoch = 1 + below(rng, 4);
      u.op = op::Reset{u.epoch, random_snapshot(rng)};
      break;
  }
  return u;
}

cdf::SyncMessage random_sync(Rng& rng, std::size_t max_updates) {
  cdf::SyncMessage m;
  m.sender = random_replica_id(rng);
  m.sender_epoch = below(rng, 4);
  std::map<std::string, std::uint64_t> vv;
  for (std::uint64_t i = below(rng, 4); i > 0; --i) vv[random_replica_id(rng)] = 1 + below(rng, 100);
  m.version_vector.assign(vv.begin(), vv.end());
  std::map<UpdateId, Update> ups;
  for (std::uint64_t i = below(rng, max_updates + 1); i > 0; --i) {
    Update u = random_update(rng);
    ups.emplace(u.id, std::move(u));
  }
  for (auto& [id, u] : ups) m.updates.push_back(std::move(u));
  return m;
}

std::vector<Update> random_pool(Rng& rng, std::size_t n, const PoolOptions& opt) {
  struct Target {
    std::string id;
    int type;  // 0 means any
  };
  std::vector<Target> targets;
  for (const auto& id : opt.counters) targets.push_back({id, 1});
  for (const auto& id : opt.sets) targets.push_back({id, 2});
  for (const auto& id : opt.maps) targets.push_back({id, 3});
  for (const auto& id : opt.mixed) targets.push_back({id, 0});

  std::map<std::string, std::set<std::uint64_t>> used_lamports;
  std::map<std::string, std::uint64_t> seqs;
  // "object/key" -> (add id, add stamp)
  std::map<std::string, std::vector<std::pair<UpdateId, LamportStamp>>> adds;
  std::uint64_t epoch_hi = 0;
  std::vector<Update> out;
  out.reserve(n);

  // A remove can only have observed adds stamped below it.
  auto observed = [&](const std::string& slot, const LamportStamp& at) {
    std::vector<UpdateId> tags;
    for (const auto& [id, stamp] : adds[slot]) {
      if (stamp < at && chance(rng, 0.6)) tags.push_back(id);
    }
    if (chance(rng, 0.15)) tags.push_back(UpdateId{pick(rng, opt.replicas), 900 + below(rng, 10)});
    std::sort(tags.begin(), tags.end());
    return tags;
  };

  for (std::size_t i = 0; i < n; ++i) {
    Update u;
    const std::string& rid = pick(rng, opt.replicas);
    auto& used = used_lamports[rid];
    std::uint64_t lamport = 1 + below(rng, opt.max_lamport);
    while (used.contains(lamport)) ++lamport;
    used.insert(lamport);
    u.id = UpdateId{rid, ++seqs[rid]};
    u.lamport = lamport;

    const Target& t = pick(rng, targets);
    u.object_id = t.id;
    if (opt.reset_weight > 0 && chance(rng, opt.reset_weight)) {
      u.object_type = static_cast<ObjectType>(t.type == 0 ? 1 + below(rng, 3) : t.type);
      u.epoch = 1 + below(rng, epoch_hi + 1);
      epoch_hi = std::max(epoch_hi, u.epoch);
      u.op = op::Reset{u.epoch, random_snapshot(rng)};
      out.push_back(std::move(u));
      continue;
    }
    u.epoch = below(rng, epoch_hi + 1);
    const int type = t.type == 0 ? static_cast<int>(1 + below(rng, 3)) : t.type;
    u.object_type = static_cast<ObjectType>(type);
    const std::string& element = pick(rng, opt.elements);
    if (type == 1) {
      u.op = op::CounterAdd{static_cast<std::int64_t>(below(rng, 9)) - 4};
    } else if (type == 2) {
      const std::string slot = t.id;
      if (chance(rng, 0.6)) {
        u.op = op::SetAdd{to_bytes(element)};
        adds[slot].emplace_back(u.id, u.stamp());
      } else {
        u.op = op::SetRemove{to_bytes(element), observed(slot, u.stamp())};
      }
    } else {
      const std::string& key = pick(rng, opt.keys);
      const std::string slot = t.id + "/" + key;
      switch (below(rng, 6)) {
        case 0:
          u.op = op::MapPut{key, static_cast<std::int64_t>(below(rng, 3))};
          break;
        case 1:
          u.op = op::MapRemoveKey{key};
          break;
        case 2:
          u.op = op::MapCounterAdd{key, static_cast<std::int64_t>(below(rng, 9)) - 4};
          break;
        case 3:
        case 4:
          u.op = op::MapSetAdd{key, to_bytes(element)};
          adds[slot].emplace_back(u.id, u.stamp());
          break;
        default:
          u.op = op::MapSetRemove{key, to_bytes(element), observed(slot, u.stamp())};
          break;
      }
    }
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace polyrdl::harness
