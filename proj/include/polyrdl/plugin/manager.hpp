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

#ifndef POLYRDL_PLUGIN_MANAGER_HPP_
#define POLYRDL_PLUGIN_MANAGER_HPP_

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyrdl/plugin/descriptor.hpp"
#include "polyrdl/plugin/protocol.hpp"
#include "polyrdl/plugin/session.hpp"

namespace polyrdl::plugin {

struct IntegrationResult {
  std::string plugin_id;
  IntegrationCode code = IntegrationCode::kOk;
  std::string message;
};

using IntegrationReport = std::vector<IntegrationResult>;

struct ManagerOptions {
  std::string host_replica;
  // Passed to spawned plug-ins as --data-dir when set.
  std::optional<std::filesystem::path> data_dir;
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds hello_timeout{3000};
  std::size_t queue_cap = kDefaultQueueCap;
};

/// Integrates plug-ins into one host replica and fans committed effects
/// out to their sessions.
class PluginManager {
 public:
  PluginManager(CommandExecutor& exec, ManagerOptions opt);
  ~PluginManager();
  PluginManager(const PluginManager&) = delete;
  PluginManager& operator=(const PluginManager&) = delete;

  /// For each (id, metadata path) in order: parse, generate the wire
  /// schema, validate it, then locate, deploy and handshake. A failure is
  /// recorded for that plug-in and the next one is tried.
  IntegrationReport integrate(const std::vector<std::string>& plugin_ids,
                              const std::vector<std::filesystem::path>& metadata_paths);

  void dispatch(std::string_view core_function, const Update* update, const Bytes& result_view);

  std::vector<std::string> deployed() const;
  /// Null when no session with that id exists.
  std::shared_ptr<PluginSession> session(const std::string& plugin_id) const;
  void shutdown();

 private:
  IntegrationResult integrate_one(const std::string& id, const std::filesystem::path& meta);

  CommandExecutor& exec_;
  ManagerOptions opt_;
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<PluginSession>> sessions_;
};

}  // namespace polyrdl::plugin

#endif  // POLYRDL_PLUGIN_MANAGER_HPP_
