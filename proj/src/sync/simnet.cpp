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

#include "polyrdl/sync/simnet.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "polyrdl/cdf/digest.hpp"
#include "polyrdl/cdf/wire.hpp"

namespace polyrdl::sync {

void PartitionSchedule::isolate(std::uint64_t start, std::uint64_t end, const std::vector<std::string>& side,
                                const std::vector<std::string>& all) {
  PartitionWindow w{start, end, {}};
  for (const auto& a : side) {
    for (const auto& b : all) {
      if (std::find(side.begin(), side.end(), b) == side.end()) w.cut.emplace_back(a, b);
    }
  }
  add(std::move(w));
}

bool PartitionSchedule::blocked(const std::string& a, const std::string& b, std::uint64_t t) const {
  for (const auto& w : windows_) {
    if (t < w.start || t >= w.end) continue;
    for (const auto& [x, y] : w.cut) {
      if ((x == a && y == b) || (x == b && y == a)) return true;
    }
  }
  return false;
}

std::uint64_t PartitionSchedule::healed_at() const {
  std::uint64_t t = 0;
  for (const auto& w : windows_) t = std::max(t, w.end);
  return t;
}

struct SimNetwork::HashState {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  HashState() { EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr); }
  ~HashState() { EVP_MD_CTX_free(ctx); }
};

SimNetwork::SimNetwork(SimOptions opt, PartitionSchedule schedule)
    : opt_(opt), schedule_(std::move(schedule)), rng_(opt.seed), hash_(std::make_unique<HashState>()) {}

SimNetwork::~SimNetwork() = default;

void SimNetwork::attach(const std::string& name, Handler h) {
  std::lock_guard lock(mu_);
  handlers_[name] = std::move(h);
}

void SimNetwork::send(const std::string& from, const std::string& to, Bytes frame) {
  std::lock_guard lock(mu_);
  std::uniform_int_distribution<std::uint64_t> delay(opt_.min_delay, std::max(opt_.min_delay, opt_.max_delay));
  std::uint64_t due = now_ + delay(rng_);
  if (opt_.fifo) {
    auto& tail = link_tail_[{from, to}];
    due = std::max(due, tail);
    tail = due;
  }
  pending_.push_back(Pending{due, next_seq_++, from, to, std::move(frame)});
}

void SimNetwork::broadcast(const std::string& from, const Bytes& frame) {
  std::vector<std::string> peers;
  {
    std::lock_guard lock(mu_);
    for (const auto& [name, h] : handlers_) {
      if (name != from) peers.push_back(name);
    }
  }
  for (const auto& p : peers) send(from, p, frame);
}

std::size_t SimNetwork::step() {
  std::vector<Pending> due;
  std::vector<Handler*> targets;
  {
    std::lock_guard lock(mu_);
    ++now_;
    auto ready = [&](const Pending& p) { return p.due <= now_ && !schedule_.blocked(p.from, p.to, now_); };
    auto it = std::stable_partition(pending_.begin(), pending_.end(), [&](const Pending& p) { return !ready(p); });
    due.assign(std::make_move_iterator(it), std::make_move_iterator(pending_.end()));
    pending_.erase(it, pending_.end());
    std::sort(due.begin(), due.end(), [](const Pending& a, const Pending& b) {
      return a.due != b.due ? a.due < b.due : a.seq < b.seq;
    });
    for (const auto& p : due) {
      auto h = handlers_.find(p.to);
      targets.push_back(h == handlers_.end() ? nullptr : &h->second);
      const auto digest = cdf::sha256(p.frame);
      nlohmann::json line = {{"t", now_},           {"seq", p.seq},
                             {"from", p.from},      {"to", p.to},
                             {"bytes", p.frame.size()}, {"sha256", cdf::hex_encode(digest)}};
      std::string s = line.dump();
      s.push_back('\n');
      EVP_DigestUpdate(hash_->ctx, s.data(), s.size());
      if (opt_.keep_trace) trace_.push_back(std::move(s));
    }
    delivered_ += due.size();
  }
  for (std::size_t i = 0; i < due.size(); ++i) {
    if (targets[i]) (*targets[i])(due[i].from, due[i].frame);
  }
  return due.size();
}

std::size_t SimNetwork::run_until_idle(std::uint64_t max_steps) {
  std::size_t n = 0;
  for (std::uint64_t i = 0; i < max_steps && pending() > 0; ++i) n += step();
  return n;
}

std::uint64_t SimNetwork::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

std::size_t SimNetwork::pending() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

std::uint64_t SimNetwork::sent() const {
  std::lock_guard lock(mu_);
  return next_seq_;
}

std::uint64_t SimNetwork::delivered() const {
  std::lock_guard lock(mu_);
  return delivered_;
}

std::vector<std::string> SimNetwork::endpoints() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, h] : handlers_) out.push_back(name);
  return out;
}

std::string SimNetwork::trace_hash() const {
  std::lock_guard lock(mu_);
  EVP_MD_CTX* copy = EVP_MD_CTX_new();
  EVP_MD_CTX_copy_ex(copy, hash_->ctx);
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy, out.data(), &len);
  EVP_MD_CTX_free(copy);
  return cdf::hex_encode(out);
}

void SimNetwork::write_trace(std::ostream& out) const {
  std::lock_guard lock(mu_);
  for (const auto& line : trace_) out << line;
}

}  // namespace polyrdl::sync
