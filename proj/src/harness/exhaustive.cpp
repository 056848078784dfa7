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

#include "polyrdl/harness/exhaustive.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/replica.hpp"
#include "polyrdl/harness/oracle.hpp"

namespace polyrdl::harness {

namespace {

class Builder {
 public:
  Builder& add(std::string rid, std::uint64_t lamport, std::string obj, ObjectType type, OpPayload op,
               std::uint64_t epoch = 0) {
    Update u;
    u.id = {rid, ++seq_[rid]};
    u.lamport = lamport;
    u.epoch = epoch;
    u.object_id = std::move(obj);
    u.object_type = type;
    u.op = std::move(op);
    out_.push_back(std::move(u));
    return *this;
  }
  UpdateId last() const { return out_.back().id; }
  std::vector<Update> take() { return std::move(out_); }

 private:
  std::map<std::string, std::uint64_t> seq_;
  std::vector<Update> out_;
};

constexpr auto C = ObjectType::kCounter;
constexpr auto S = ObjectType::kSet;
constexpr auto M = ObjectType::kMap;

Bytes b(const char* s) { return to_bytes(s); }

std::string describe(const std::vector<Update>& order) {
  std::string s;
  for (const auto& u : order) {
    if (!s.empty()) s += ", ";
    s += u.id.replica_id + ":" + std::to_string(u.id.seq) + "@" + std::to_string(u.lamport) + " " +
         std::string(to_string(op_kind(u.op)));
  }
  return s;
}

// Renames replicas, in ids and in observed tags alike.
std::vector<Update> relabel(std::vector<Update> ups, const std::map<std::string, std::string>& to) {
  auto fix = [&](UpdateId& id) {
    if (auto it = to.find(id.replica_id); it != to.end()) id.replica_id = it->second;
  };
  for (auto& u : ups) {
    fix(u.id);
    if (auto* r = std::get_if<op::SetRemove>(&u.op)) std::for_each(r->observed_tags.begin(), r->observed_tags.end(), fix);
    if (auto* r = std::get_if<op::MapSetRemove>(&u.op)) std::for_each(r->observed_tags.begin(), r->observed_tags.end(), fix);
  }
  return ups;
}

}  // namespace

std::vector<Update> counter_candidates() {
  Builder x;
  x.add("A", 1, "c", C, op::CounterAdd{5});
  x.add("B", 1, "c", C, op::CounterAdd{-3});
  x.add("C", 2, "c", C, op::CounterAdd{1});
  x.add("A", 3, "c", C, op::CounterAdd{-1});
  x.add("B", 3, "c", C, op::CounterAdd{10});
  x.add("C", 4, "c", C, op::CounterAdd{0});
  x.add("A", 5, "c", C, op::CounterAdd{INT64_C(1) << 40});
  x.add("B", 6, "c", C, op::CounterAdd{-(INT64_C(1) << 40)});
  x.add("C", 7, "c", C, op::CounterAdd{2});
  x.add("A", 8, "c", C, op::CounterAdd{-7});
  return x.take();
}

std::vector<Update> set_candidates() {
  Builder x;
  x.add("A", 1, "s", S, op::SetAdd{b("x")});
  const UpdateId ax = x.last();
  x.add("B", 1, "s", S, op::SetAdd{b("x")});
  const UpdateId bx = x.last();
  x.add("A", 2, "s", S, op::SetAdd{b("y")});
  const UpdateId ay = x.last();
  x.add("B", 3, "s", S, op::SetRemove{b("x"), {ax}});
  x.add("C", 4, "s", S, op::SetRemove{b("x"), {ax, bx}});
  x.add("C", 5, "s", S, op::SetAdd{b("x")});
  const UpdateId cx = x.last();
  x.add("A", 3, "s", S, op::SetRemove{b("y"), {ay}});
  x.add("B", 6, "s", S, op::SetRemove{b("y"), {}});
  x.add("B", 7, "s", S, op::SetAdd{b("y")});
  x.add("A", 8, "s", S, op::SetRemove{b("x"), {ax, bx, cx}});
  return x.take();
}

std::vector<Update> map_candidates() {
  Builder x;
  x.add("A", 1, "m", M, op::MapPut{"k1", std::int64_t{1}});
  x.add("B", 1, "m", M, op::MapPut{"k1", std::string("v")});
  x.add("C", 2, "m", M, op::MapCounterAdd{"k1", 2});
  x.add("B", 2, "m", M, op::MapSetAdd{"k2", b("x")});
  const UpdateId bx = x.last();
  x.add("A", 3, "m", M, op::MapRemoveKey{"k1"});
  x.add("C", 4, "m", M, op::MapSetRemove{"k2", b("x"), {bx}});
  x.add("A", 5, "m", M, op::MapPut{"k2", true});
  x.add("B", 6, "m", M, op::MapCounterAdd{"k2", 3});
  x.add("C", 7, "m", M, op::MapRemoveKey{"k2"});
  x.add("A", 8, "m", M, op::MapSetAdd{"k1", b("y")});
  x.add("B", 8, "m", M, op::MapPut{"k1", 0.5});
  return x.take();
}

std::vector<Update> mixed_candidates() {
  Replica p("P");
  p.local_update("c", C, op::CounterAdd{7});
  p.local_update("s", S, op::SetAdd{b("y")});
  const Bytes snapshot = p.encode_state();

  Builder x;
  x.add("A", 1, "c", C, op::CounterAdd{2});
  x.add("B", 1, "s", S, op::SetAdd{b("x")});
  const UpdateId bx = x.last();
  x.add("C", 2, "m", M, op::MapPut{"k1", std::int64_t{4}});
  x.add("A", 3, "s", S, op::SetRemove{b("x"), {bx}});
  x.add("B", 3, "m", M, op::MapCounterAdd{"k2", -1});
  x.add("C", 4, "m", M, op::MapRemoveKey{"k1"});
  x.add("P", 5, "", C, op::Reset{1, snapshot}, 1);
  x.add("A", 6, "c", C, op::CounterAdd{1}, 1);
  x.add("B", 6, "m", M, op::MapSetAdd{"k1", b("z")}, 1);
  x.add("C", 7, "c", C, op::CounterAdd{5});
  return x.take();
}

std::vector<Update> combined_candidates() {
  auto c = counter_candidates();
  auto s = relabel(set_candidates(), {{"A", "D"}, {"B", "E"}, {"C", "F"}});
  auto m = relabel(map_candidates(), {{"A", "G"}, {"B", "H"}, {"C", "I"}});
  std::vector<Update> out(c.begin(), c.begin() + 4);
  out.insert(out.end(), s.begin(), s.begin() + 7);
  out.insert(out.end(), m.begin(), m.begin() + 7);
  return out;
}

ExhaustiveResult exhaustive_check(const std::string& name, const std::vector<Update>& candidates,
                                  std::size_t max_size) {
  ExhaustiveResult res{name};
  const std::size_t n = candidates.size();
  const std::size_t top = std::min(max_size, n);
  for (std::size_t k = 0; k <= top; ++k) {
    // Walk the k-subsets in lexicographic order of index vectors.
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      ++res.subsets;
      std::vector<Update> subset;
      for (std::size_t i : pick) subset.push_back(candidates[i]);
      const Bytes expected = oracle_fold(subset);
      std::vector<std::size_t> order(k);
      std::iota(order.begin(), order.end(), 0);
      do {
        ++res.orders;
        Replica r("R");
        for (std::size_t i : order) r.apply_update(subset[i]);
        if (r.encode_state() != expected) {
          if (res.mismatches++ == 0) {
            std::vector<Update> seq;
            for (std::size_t i : order) seq.push_back(subset[i]);
            res.first_mismatch = describe(seq) + ": got " + cdf::hex_encode(r.encode_state()) + " want " +
                                 cdf::hex_encode(expected);
          }
        }
      } while (std::next_permutation(order.begin(), order.end()));

      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return res;
}

}  // namespace polyrdl::harness
