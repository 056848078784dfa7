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

#ifndef POLYRDL_PLUGINS_UNDO_HPP_
#define POLYRDL_PLUGINS_UNDO_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyrdl/plugin/endpoint.hpp"
#include "polyrdl/plugin/protocol.hpp"

namespace polyrdl::plugins {

enum class UndoCode : std::uint8_t { kOk, kUnknownUpdate, kIdempotentNoop, kUnsupported, kCommandFailed };

std::string_view to_string(UndoCode c);

struct UndoResult {
  UndoCode code = UndoCode::kOk;
  std::vector<Update> issued;
  std::string message;
};

/// "A:3" to {"A", 3}; nullopt when malformed.
std::optional<UpdateId> parse_update_id(std::string_view s);

/// Updates that cancel `target`, given the object's value just before and
/// just after it was applied. Throws Error{kInvalidArgument} for Reset.
std::vector<plugin::UpdateArgs> compensations(const Update& target, const plugin::ChangeViews& views);

/// Keeps a shadow copy of every update it is told about and issues
/// compensating updates on request.
class UndoPlugin {
 public:
  explicit UndoPlugin(plugin::EndpointOptions opt);

  void start() { endpoint_.start(); }
  void stop() { endpoint_.stop(); }
  plugin::PluginEndpoint& endpoint() { return endpoint_; }

  UndoResult undo(const UpdateId& target);
  std::size_t shadow_size() const;
  bool knows(const UpdateId& id) const;

 private:
  struct Shadow {
    Update update;
    plugin::ChangeViews views;
    bool compensated = false;
  };
  void observe(const cdf::PluginEvent& ev);

  mutable std::mutex mu_;
  std::map<UpdateId, Shadow> shadow_;
  plugin::PluginEndpoint endpoint_;
};

}  // namespace polyrdl::plugins

#endif  // POLYRDL_PLUGINS_UNDO_HPP_
