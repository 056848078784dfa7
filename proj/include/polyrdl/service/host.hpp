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

#ifndef POLYRDL_SERVICE_HOST_HPP_
#define POLYRDL_SERVICE_HOST_HPP_

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "polyrdl/plugin/manager.hpp"
#include "polyrdl/service/node.hpp"

namespace polyrdl::service {

/// A node with its plug-in manager wired in: committed effects go to the
/// plug-ins, plug-in commands go to the node.
class Host {
 public:
  explicit Host(NodeOptions opt, std::chrono::milliseconds connect_timeout = std::chrono::seconds(5),
                std::size_t queue_cap = plugin::kDefaultQueueCap);
  ~Host();
  Host(const Host&) = delete;
  Host& operator=(const Host&) = delete;

  Node& node() { return *node_; }
  plugin::PluginManager& plugins() { return *plugins_; }

  plugin::IntegrationReport integrate(const std::vector<std::string>& ids,
                                      const std::vector<std::filesystem::path>& metadata) {
    return plugins_->integrate(ids, metadata);
  }

 private:
  std::unique_ptr<Node> node_;
  std::unique_ptr<plugin::PluginManager> plugins_;
};

}  // namespace polyrdl::service

#endif  // POLYRDL_SERVICE_HOST_HPP_
