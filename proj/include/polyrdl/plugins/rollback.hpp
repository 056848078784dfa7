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

#ifndef POLYRDL_PLUGINS_ROLLBACK_HPP_
#define POLYRDL_PLUGINS_ROLLBACK_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "polyrdl/plugin/endpoint.hpp"

namespace polyrdl::plugins {

enum class RollbackCode : std::uint8_t { kOk, kUnknownCheckpoint, kDuplicateLabel, kBadLabel, kCommandFailed };

std::string_view to_string(RollbackCode c);

struct RollbackResult {
  RollbackCode code = RollbackCode::kOk;
  std::optional<Update> reset;  // restore only
  std::string message;
};

/// Takes named checkpoints of the host replica and restores them by having
/// the host emit a Reset. Checkpoints live under `<store>/checkpoints`,
/// the same place the host's own storage keeps them.
class RollbackPlugin {
 public:
  RollbackPlugin(plugin::EndpointOptions opt, std::filesystem::path store);

  void start() { endpoint_.start(); }
  void stop() { endpoint_.stop(); }
  plugin::PluginEndpoint& endpoint() { return endpoint_; }

  RollbackResult checkpoint(const std::string& label);
  /// Resets the host to the checkpoint, then asks it to sync.
  RollbackResult restore(const std::string& label);

 private:
  std::filesystem::path store_;
  plugin::PluginEndpoint endpoint_;
};

}  // namespace polyrdl::plugins

#endif  // POLYRDL_PLUGINS_ROLLBACK_HPP_
