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

#ifndef POLYRDL_PLUGIN_DESCRIPTOR_HPP_
#define POLYRDL_PLUGIN_DESCRIPTOR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyrdl::plugin {

/// Per-plug-in outcome of integration.
enum class IntegrationCode : std::uint8_t {
  kOk,
  kMetadataMissing,
  kSchemaError,     // not JSON, wrong keys or wrong value types
  kIdMismatch,      // metadata plugin_id differs from the requested id
  kDuplicateId,
  kValidateError,   // unknown or repeated core function names
  kPortConflict,
  kLocateError,     // executable not found or not runnable
  kDeployError,     // spawn, connect or handshake transport failure
  kHelloMismatch,
};

std::string_view to_string(IntegrationCode c);

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(IntegrationCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  IntegrationCode code() const noexcept { return code_; }

 private:
  IntegrationCode code_;
};

struct PluginDescriptor {
  std::string plugin_id;
  std::string name;
  std::uint16_t address = 0;  // loopback port
  std::string executable;     // a path, or "external" to attach to a running process
  std::vector<std::string> subscriptions;
  std::vector<std::string> permissions;
  std::uint32_t schema_version = 0;

  bool external() const { return executable == "external"; }
  bool subscribed(std::string_view fn) const;
  bool permitted(std::string_view fn) const;
};

/// Parses metadata JSON with exactly the keys plugin_id, name, address,
/// executable, subscriptions, permissions and schema_version. Throws
/// IntegrationFailure{kSchemaError}.
PluginDescriptor parse_descriptor(const std::string& json_text);

std::string descriptor_json(const PluginDescriptor& d);

/// The table a session works from: for each core function the plug-in
/// touches, the layout of command arguments and of the event payload.
struct WireSchema {
  struct Entry {
    std::string function;
    std::string args_layout;
    std::string result_layout;
    bool subscribed = false;
    bool permitted = false;
  };
  std::string plugin_id;
  std::uint32_t schema_version = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view fn) const;
};

/// Unknown function names are left in the table with empty layouts, for
/// validate_schema to report.
WireSchema generate_schema(const PluginDescriptor& d);

/// Throws IntegrationFailure{kValidateError}.
void validate_schema(const PluginDescriptor& d, const WireSchema& s);

}  // namespace polyrdl::plugin

#endif  // POLYRDL_PLUGIN_DESCRIPTOR_HPP_
