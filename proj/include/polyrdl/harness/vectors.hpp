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

#ifndef POLYRDL_HARNESS_VECTORS_HPP_
#define POLYRDL_HARNESS_VECTORS_HPP_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/core/types.hpp"

namespace polyrdl::harness {

struct GoldenVector {
  std::string name;  // file stem
  std::string description;
  Bytes frame;
  // SYNC vectors only: canonical state and its digest after a fresh
  // replica applies the updates in message order.
  std::optional<Bytes> state;
};

/// The fixed golden suite: every message type, op kind and scalar tag.
std::vector<GoldenVector> golden_vectors();

/// Writes <name>.hex per vector (hex, 32 bytes per line) and manifest.json.
void write_vectors(const std::filesystem::path& dir, const std::vector<GoldenVector>& vectors);

struct VectorCheck {
  std::string file;
  bool ok = false;
  std::string detail;
};

/// Re-checks a vector directory on its own terms: each file holds exactly one
/// frame, decoding and re-encoding it (payload included) gives the same
/// bytes, and SYNC vectors reproduce the manifest's state and digest.
std::vector<VectorCheck> check_vectors(const std::filesystem::path& dir);

/// Re-encodes a frame through the typed payload decoders. Throws DecodeError.
Bytes reencode_frame(const Bytes& frame);

/// What the vectors in `dir` exercise, from the frames themselves.
struct VectorCoverage {
  std::size_t frames = 0;
  std::set<cdf::MsgType> msg_types;
  std::set<OpKind> op_kinds;
  std::set<ScalarTag> scalar_tags;
  // SYNC vectors whose manifest state differs from the oracle fold.
  std::vector<std::string> oracle_mismatches;
};

VectorCoverage vector_coverage(const std::filesystem::path& dir);

struct FuzzResult {
  std::size_t cases = 0;
  std::size_t typed_errors = 0;  // cases where some decoder threw DecodeError
  std::size_t accepted = 0;      // decoders that accepted input and re-encoded it identically
  std::size_t untyped = 0;       // any other exception, or an accepted input that re-encodes differently
  std::string first_untyped;
};

/// Feeds `cases` inputs to every decoder: random byte strings, and golden
/// frames with bytes flipped, cut or appended.
FuzzResult fuzz_decoders(const std::vector<GoldenVector>& seeds, std::size_t cases, std::uint64_t seed);

}  // namespace polyrdl::harness

#endif  // POLYRDL_HARNESS_VECTORS_HPP_
