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

#ifndef POLYRDL_SYNC_SIMNET_HPP_
#define POLYRDL_SYNC_SIMNET_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polyrdl/core/types.hpp"

namespace polyrdl::sync {

/// Links cut during [start, end) of virtual time. Links are undirected.
struct PartitionWindow {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::vector<std::pair<std::string, std::string>> cut;
};

class PartitionSchedule {
 public:
  void add(PartitionWindow w) { windows_.push_back(std::move(w)); }
  /// Cuts every link between `side` and the rest of `all`.
  void isolate(std::uint64_t start, std::uint64_t end, const std::vector<std::string>& side,
               const std::vector<std::string>& all);

  bool blocked(const std::string& a, const std::string& b, std::uint64_t t) const;
  /// First instant at which no window is active any more.
  std::uint64_t healed_at() const;
  const std::vector<PartitionWindow>& windows() const { return windows_; }

 private:
  std::vector<PartitionWindow> windows_;
};

struct SimOptions {
  std::uint64_t seed = 1;
  std::uint64_t min_delay = 1;
  std::uint64_t max_delay = 8;
  // Per-link first-in first-out delivery. Off by default: reordering is
  // part of what the harness exercises.
  bool fifo = false;
  bool keep_trace = false;
};

/// Deterministic in-process network. Delivery order is a pure function of
/// the options, the schedule and the sequence of sends.
class SimNetwork {
 public:
  using Handler = std::function<void(const std::string& from, const Bytes& frame)>;

  explicit SimNetwork(SimOptions opt = {}, PartitionSchedule schedule = {});
  ~SimNetwork();
  SimNetwork(const SimNetwork&) = delete;
  SimNetwork& operator=(const SimNetwork&) = delete;

  void attach(const std::string& name, Handler h);
  void send(const std::string& from, const std::string& to, Bytes frame);
  void broadcast(const std::string& from, const Bytes& frame);

  /// Advances virtual time by one tick and delivers every due frame whose
  /// link is up. Returns the number delivered.
  std::size_t step();
  /// Steps until nothing is pending (or `max_steps`). Returns frames delivered.
  std::size_t run_until_idle(std::uint64_t max_steps = 1'000'000);

  std::uint64_t now() const;
  std::size_t pending() const;
  std::uint64_t sent() const;
  std::uint64_t delivered() const;
  std::vector<std::string> endpoints() const;

  /// SHA-256 over the delivery trace, hex.
  std::string trace_hash() const;
  /// JSON lines, one per delivery; needs keep_trace.
  void write_trace(std::ostream& out) const;

 private:
  struct Pending {
    std::uint64_t due;
    std::uint64_t seq;
    std::string from;
    std::string to;
    Bytes frame;
  };
  struct HashState;

  SimOptions opt_;
  PartitionSchedule schedule_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::uint64_t now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t delivered_ = 0;
  std::map<std::string, Handler> handlers_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> link_tail_;
  std::vector<Pending> pending_;
  std::vector<std::string> trace_;
  std::unique_ptr<HashState> hash_;
};

}  // namespace polyrdl::sync

#endif  // POLYRDL_SYNC_SIMNET_HPP_
