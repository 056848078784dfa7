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

#ifndef POLYRDL_PLUGINS_LOGGING_HPP_
#define POLYRDL_PLUGINS_LOGGING_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "polyrdl/plugin/endpoint.hpp"

namespace polyrdl::plugins {

struct AuditRecord {
  std::string wall_time;       // UTC, ISO 8601 with milliseconds
  std::int64_t wall_ms = 0;    // same instant, ms since the Unix epoch
  std::uint64_t event_seq = 0;
  std::string host;            // replica that reported the event
  std::string replica_id;      // replica that originated the update
  std::string core_function;
  std::string update;          // full CDF encoding, hex
  std::uint64_t lamport = 0;
  std::uint64_t epoch = 0;
  std::string object_id;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

std::string audit_json(const AuditRecord& r);
AuditRecord parse_audit(const std::string& line);

struct AuditFilter {
  std::optional<std::int64_t> from_ms;  // inclusive
  std::optional<std::int64_t> to_ms;    // inclusive
  std::optional<std::string> replica_id;
  std::optional<std::string> object_id;
};

/// Reads the audit file; a missing file is an empty log.
std::vector<AuditRecord> query_audit(const std::filesystem::path& file, const AuditFilter& filter = {});

/// Appends one record per update-carrying event, in arrival order.
class LoggingPlugin {
 public:
  LoggingPlugin(plugin::EndpointOptions opt, std::filesystem::path log_file);

  void start() { endpoint_.start(); }
  void stop() { endpoint_.stop(); }
  plugin::PluginEndpoint& endpoint() { return endpoint_; }
  std::uint64_t records() const;
  /// I/O failures stay inside the plug-in.
  std::uint64_t write_errors() const;

 private:
  void record(const cdf::PluginEvent& ev);

  std::filesystem::path file_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::uint64_t records_ = 0;
  std::uint64_t write_errors_ = 0;
  plugin::PluginEndpoint endpoint_;
};

}  // namespace polyrdl::plugins

#endif  // POLYRDL_PLUGINS_LOGGING_HPP_
