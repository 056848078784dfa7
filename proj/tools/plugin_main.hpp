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

#ifndef POLYRDL_TOOLS_PLUGIN_MAIN_HPP_
#define POLYRDL_TOOLS_PLUGIN_MAIN_HPP_

#include <functional>
#include <iostream>
#include <string>
#include <thread>

#include "polyrdl/plugin/endpoint.hpp"

namespace polyrdl::tools {

/// Serves until the host disconnects. Lines on stdin are handed to
/// `control`; "quit" stops early.
inline int serve_plugin(plugin::PluginEndpoint& ep, const std::function<void(const std::string&)>& control) {
  ep.start();
  std::cout << "listening " << ep.port() << std::endl;
  std::thread input([&] {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line == "quit") {
        ep.stop();
        return;
      }
      if (!line.empty() && control) control(line);
    }
  });
  input.detach();
  ep.wait_host_gone();
  ep.stop();
  return 0;
}

}  // namespace polyrdl::tools

#endif  // POLYRDL_TOOLS_PLUGIN_MAIN_HPP_
