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

#ifndef POLYRDL_HARNESS_BENCH_HPP_
#define POLYRDL_HARNESS_BENCH_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polyrdl/core/types.hpp"
#include "polyrdl/harness/scenario.hpp"

namespace polyrdl::harness {

struct BenchConfig {
  std::vector<ObjectType> types{ObjectType::kCounter, ObjectType::kSet, ObjectType::kMap};
  std::vector<std::size_t> ops{100, 1000, 10000};
  std::size_t repetitions = 15;
  std::uint64_t seed = 1;
  OpMix mix;
  // Distinct set elements and map keys the workload draws from.
  std::size_t alphabet = 64;
  // Run each (type, count) cell in a child process so peak memory is its own.
  bool isolate = true;
  // Isolated children per cell; the row comes from the least disturbed one.
  std::size_t processes = 3;
};

struct BenchRow {
  std::string data_type;
  std::uint64_t op_count = 0;
  double mean_op_latency_ns = 0;
  double sync_latency_ns = 0;  // one delta round: build, encode, decode, merge
  std::optional<std::uint64_t> peak_rss_bytes;  // empty when it cannot be sampled
  double throughput_ops_s = 0;
  // Timed work for the whole workload, over the repetitions.
  double mean_total_ns = 0;
  double stdev_total_ns = 0;
  // Fastest repetition. Trend comparisons use it: interference from other
  // processes only ever adds time.
  double min_total_ns = 0;
  // Seed-deterministic counts.
  std::uint64_t updates = 0;
  std::uint64_t accesses = 0;
  std::uint64_t syncs = 0;
  std::uint64_t applied_at_peer = 0;
};

ObjectType parse_data_type(const std::string& s);
std::string data_type_name(ObjectType t);

/// One cell, in this process. Peak memory is left empty.
BenchRow bench_cell(ObjectType type, std::size_t ops, const BenchConfig& cfg);
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

inline constexpr const char* kBenchCsvHeader =
    "data_type,op_count,mean_op_latency_ns,sync_latency_ns,peak_rss_bytes,throughput_ops_s";
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void print_bench_summary(std::ostream& out, const std::vector<BenchRow>& rows);

/// Current and peak resident set size of this process, from /proc.
std::optional<std::uint64_t> current_rss_bytes();
std::optional<std::uint64_t> peak_rss_bytes();

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_BENCH_HPP_
