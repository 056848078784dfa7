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

#include "polyrdl/plugin/descriptor.hpp"

#include <algorithm>
#include <array>
#include <nlohmann/json.hpp>
#include <set>

#include "polyrdl/plugin/protocol.hpp"

namespace polyrdl::plugin {

namespace {

using nlohmann::json;

struct Layout {
  std::string_view function;
  std::string_view args;
  std::string_view result;
};

constexpr std::array<Layout, 4> kLayouts = {{
    {"access", "str object_id, u8 type_hint", "view | snapshot(u64 epoch, u64 clock, vv, bytes state)"},
    {"update", "str object_id, u8 object_type, op", "bytes view_before, bytes view_after"},
    {"sync", "", "u64 updates, u64 bytes, u64 epoch"},
    {"merge", "sync_message", "u64 applied, u64 duplicates, u64 stale, u64 deferred, str error"},
}};

const Layout* layout_of(std::string_view fn) {
  for (const auto& l : kLayouts) {
    if (l.function == fn) return &l;
  }
  return nullptr;
}

[[noreturn]] void schema_error(const std::string& what) { throw IntegrationFailure(IntegrationCode::kSchemaError, what); }

std::vector<std::string> string_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) schema_error(std::string(key) + " must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) schema_error(std::string(key) + " must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string string_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) schema_error(std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::int64_t int_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) schema_error(std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace

std::string_view to_string(IntegrationCode c) {
  switch (c) {
    case IntegrationCode::kOk: return "OK";
    case IntegrationCode::kMetadataMissing: return "METADATA_MISSING";
    case IntegrationCode::kSchemaError: return "SCHEMA_ERROR";
    case IntegrationCode::kIdMismatch: return "ID_MISMATCH";
    case IntegrationCode::kDuplicateId: return "DUPLICATE_ID";
    case IntegrationCode::kValidateError: return "VALIDATE_ERROR";
    case IntegrationCode::kPortConflict: return "PORT_CONFLICT";
    case IntegrationCode::kLocateError: return "LOCATE_ERROR";
    case IntegrationCode::kDeployError: return "DEPLOY_ERROR";
    case IntegrationCode::kHelloMismatch: return "HELLO_MISMATCH";
  }
  return "?";
}

bool PluginDescriptor::subscribed(std::string_view fn) const {
  return std::find(subscriptions.begin(), subscriptions.end(), fn) != subscriptions.end();
}

bool PluginDescriptor::permitted(std::string_view fn) const {
  return std::find(permissions.begin(), permissions.end(), fn) != permissions.end();
}

PluginDescriptor parse_descriptor(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("metadata must be a JSON object");
  static const std::set<std::string> keys = {"plugin_id",     "name",        "address",       "executable",
                                             "subscriptions", "permissions", "schema_version"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) schema_error("unexpected key " + k);
  }
  for (const auto& k : keys) {
    if (!j.contains(k)) schema_error("missing key " + k);
  }

  PluginDescriptor d;
  d.plugin_id = string_field(j, "plugin_id");
  d.name = string_field(j, "name");
  d.executable = string_field(j, "executable");
  const std::int64_t port = int_field(j, "address");
  const std::int64_t version = int_field(j, "schema_version");
  d.subscriptions = string_list(j, "subscriptions");
  d.permissions = string_list(j, "permissions");

  if (d.plugin_id.empty()) schema_error("plugin_id is empty");
  if (d.executable.empty()) schema_error("executable is empty");
  if (port < 1024 || port > 65535) schema_error("address " + std::to_string(port) + " outside 1024..65535");
  if (version < 0 || version > 0xffffffffLL) schema_error("schema_version out of range");
  d.address = static_cast<std::uint16_t>(port);
  d.schema_version = static_cast<std::uint32_t>(version);
  return d;
}

std::string descriptor_json(const PluginDescriptor& d) {
  json j = {{"plugin_id", d.plugin_id},         {"name", d.name},
            {"address", d.address},             {"executable", d.executable},
            {"subscriptions", d.subscriptions}, {"permissions", d.permissions},
            {"schema_version", d.schema_version}};
  return j.dump(2);
}

const WireSchema::Entry* WireSchema::find(std::string_view fn) const {
  for (const auto& e : entries) {
    if (e.function == fn) return &e;
  }
  return nullptr;
}

WireSchema generate_schema(const PluginDescriptor& d) {
  WireSchema s;
  s.plugin_id = d.plugin_id;
  s.schema_version = d.schema_version;
  auto entry = [&](const std::string& fn) -> WireSchema::Entry& {
    for (auto& e : s.entries) {
      if (e.function == fn) return e;
    }
    WireSchema::Entry e;
    e.function = fn;
    if (const Layout* l = layout_of(fn)) {
      e.args_layout = l->args;
      e.result_layout = l->result;
    }
    s.entries.push_back(std::move(e));
    return s.entries.back();
  };
  for (const auto& fn : d.subscriptions) entry(fn).subscribed = true;
  for (const auto& fn : d.permissions) entry(fn).permitted = true;
  return s;
}

void validate_schema(const PluginDescriptor& d, const WireSchema& s) {
  auto fail = [](const std::string& what) { throw IntegrationFailure(IntegrationCode::kValidateError, what); };
  for (const auto* list : {&d.subscriptions, &d.permissions}) {
    std::set<std::string> seen;
    for (const auto& fn : *list) {
      if (!is_core_function(fn)) fail("unknown core function " + fn);
      if (!seen.insert(fn).second) fail("core function " + fn + " listed twice");
    }
  }
  if (s.plugin_id != d.plugin_id || s.schema_version != d.schema_version) fail("schema does not match descriptor");
  for (const auto& e : s.entries) {
    if (!layout_of(e.function)) fail("no layout for " + e.function);
    if (e.subscribed != d.subscribed(e.function) || e.permitted != d.permitted(e.function)) {
      fail("schema entry for " + e.function + " disagrees with the descriptor");
    }
    if (e.result_layout.empty()) fail("empty result layout for " + e.function);
  }
  for (const auto& fn : d.subscriptions) {
    if (!s.find(fn)) fail("schema lacks " + fn);
  }
  for (const auto& fn : d.permissions) {
    if (!s.find(fn)) fail("schema lacks " + fn);
  }
}

}  // namespace polyrdl::plugin
