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

#include "polyrdl/harness/bench.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace polyrdl::harness {
namespace {

BenchConfig small() {
  BenchConfig c;
  c.ops = {100, 400};
  c.repetitions = 2;
  return c;
}

TEST(BenchTest, OneRowPerCell) {
  const auto rows = run_bench(small());
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].data_type, "counter");
  EXPECT_EQ(rows[5].data_type, "map");
  for (const auto& r : rows) {
    EXPECT_GT(r.mean_op_latency_ns, 0) << r.data_type << " " << r.op_count;
    EXPECT_GT(r.throughput_ops_s, 0);
    EXPECT_EQ(r.updates + r.accesses + r.syncs, r.op_count);
    EXPECT_LE(r.applied_at_peer, r.updates);  // updates after the last sync stay local
  }
}

TEST(BenchTest, CountsAreSeedDeterministic) {
  BenchConfig c = small();
  c.isolate = false;
  const auto a = run_bench(c);
  const auto b = run_bench(c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].updates, b[i].updates);
    EXPECT_EQ(a[i].syncs, b[i].syncs);
    EXPECT_EQ(a[i].applied_at_peer, b[i].applied_at_peer);
  }
}

TEST(BenchTest, CsvLayout) {
  BenchConfig c = small();
  c.types = {ObjectType::kSet};
  c.ops = {100};
  const auto rows = run_bench(c);
  std::ostringstream out;
  write_bench_csv(out, rows);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, kBenchCsvHeader);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("set,100,", 0), 0u) << line;
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
}

TEST(BenchTest, ParsesTypeNames) {
  EXPECT_EQ(parse_data_type("counter"), ObjectType::kCounter);
  EXPECT_EQ(parse_data_type("map"), ObjectType::kMap);
  EXPECT_THROW(parse_data_type("list"), std::exception);
}

}  // namespace
}  // namespace polyrdl::harness
