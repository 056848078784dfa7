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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "polyrdl/cdf/wire.hpp"
#include "test_util.hpp"

namespace polyrdl::harness {
namespace {

namespace fs = std::filesystem;
using cdf::MsgType;

const fs::path kDir = POLYRDL_TESTDATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(VectorsTest, CheckedInFilesPass) {
  const auto checks = check_vectors(kDir);
  EXPECT_GE(checks.size(), 30u);
  for (const auto& c : checks) EXPECT_TRUE(c.ok) << c.file << ": " << c.detail;
}

TEST(VectorsTest, CoverEveryTag) {
  const VectorCoverage cov = vector_coverage(kDir);
  EXPECT_GE(cov.frames, 30u);
  EXPECT_EQ(cov.msg_types, (std::set<MsgType>{MsgType::kSync, MsgType::kPluginEvent, MsgType::kPluginCmd,
                                              MsgType::kPluginErr, MsgType::kPluginHello}));
  EXPECT_EQ(cov.op_kinds, (std::set<OpKind>{OpKind::kCounterAdd, OpKind::kSetAdd, OpKind::kSetRemove, OpKind::kMapPut,
                                            OpKind::kMapRemoveKey, OpKind::kMapCounterAdd, OpKind::kMapSetAdd,
                                            OpKind::kMapSetRemove, OpKind::kReset}));
  EXPECT_EQ(cov.scalar_tags, (std::set<ScalarTag>{ScalarTag::kInt, ScalarTag::kFloat, ScalarTag::kBool,
                                                  ScalarTag::kString, ScalarTag::kBytes}));
}

TEST(VectorsTest, StatesMatchOracle) { EXPECT_TRUE(vector_coverage(kDir).oracle_mismatches.empty()); }

TEST(VectorsTest, RegeneratedFilesIdentical) {
  polyrdl::testing::TempDir d("vec");
  write_vectors(d.path(), golden_vectors());
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(d.path())) {
    const auto name = e.path().filename();
    EXPECT_EQ(slurp(e.path()), slurp(kDir / name)) << name;
    ++n;
  }
  std::size_t checked_in = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(kDir)) ++checked_in;
  EXPECT_EQ(n, checked_in);
}

TEST(VectorsTest, CorruptedFileCaught) {
  polyrdl::testing::TempDir d("vec");
  write_vectors(d.path(), golden_vectors());
  const auto checks = check_vectors(d.path());
  ASSERT_FALSE(checks.empty());
  // Flip one nibble in the middle of the first SYNC file and truncate a second file.
  const fs::path first = d / checks[0].file;
  std::string text = slurp(first);
  auto pos = text.size() / 2;
  while (!std::isxdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  text[pos] = text[pos] == '0' ? '1' : '0';
  std::ofstream(first, std::ios::binary | std::ios::trunc) << text;
  const fs::path second = d / checks[1].file;
  std::string t2 = slurp(second);
  std::ofstream(second, std::ios::binary | std::ios::trunc) << t2.substr(0, 20);

  const auto after = check_vectors(d.path());
  EXPECT_FALSE(after[0].ok);
  EXPECT_FALSE(after[1].ok);
  for (std::size_t i = 2; i < after.size(); ++i) EXPECT_TRUE(after[i].ok) << after[i].file;
}

TEST(VectorsTest, ReencodeIsIdentityOnGoldens) {
  for (const auto& g : golden_vectors()) EXPECT_EQ(reencode_frame(g.frame), g.frame) << g.name;
}

TEST(FuzzTest, DecodersOnlyThrowTypedErrors) {
  const FuzzResult r = fuzz_decoders(golden_vectors(), 20000, 11);
  EXPECT_EQ(r.cases, 20000u);
  EXPECT_EQ(r.untyped, 0u) << r.first_untyped;
  EXPECT_GT(r.typed_errors, 19000u);
}

}  // namespace
}  // namespace polyrdl::harness
