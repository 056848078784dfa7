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

#include "polyrdl/plugins/logging.hpp"

#include <chrono>
#include <ctime>
#include <nlohmann/json.hpp>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/wire.hpp"

namespace polyrdl::plugins {

namespace {

using nlohmann::json;

std::string iso_time(std::int64_t ms) {
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  ::gmtime_r(&secs, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
  return out;
}

}  // namespace

std::string audit_json(const AuditRecord& r) {
  json j = {{"wall_time", r.wall_time}, {"wall_ms", r.wall_ms},         {"event_seq", r.event_seq},
            {"host", r.host},           {"replica_id", r.replica_id},   {"core_function", r.core_function},
            {"update", r.update},       {"stamp", {r.lamport, r.replica_id}}, {"epoch", r.epoch},
            {"object_id", r.object_id}};
  return j.dump();
}

AuditRecord parse_audit(const std::string& line) {
  const json j = json::parse(line);
  AuditRecord r;
  r.wall_time = j.at("wall_time").get<std::string>();
  r.wall_ms = j.at("wall_ms").get<std::int64_t>();
  r.event_seq = j.at("event_seq").get<std::uint64_t>();
  r.host = j.at("host").get<std::string>();
  r.replica_id = j.at("replica_id").get<std::string>();
  r.core_function = j.at("core_function").get<std::string>();
  r.update = j.at("update").get<std::string>();
  r.lamport = j.at("stamp").at(0).get<std::uint64_t>();
  r.epoch = j.at("epoch").get<std::uint64_t>();
  r.object_id = j.at("object_id").get<std::string>();
  return r;
}

std::vector<AuditRecord> query_audit(const std::filesystem::path& file, const AuditFilter& f) {
  std::vector<AuditRecord> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    AuditRecord r = parse_audit(line);
    if (f.from_ms && r.wall_ms < *f.from_ms) continue;
    if (f.to_ms && r.wall_ms > *f.to_ms) continue;
    if (f.replica_id && r.replica_id != *f.replica_id) continue;
    if (f.object_id && r.object_id != *f.object_id) continue;
    out.push_back(std::move(r));
  }
  return out;
}

LoggingPlugin::LoggingPlugin(plugin::EndpointOptions opt, std::filesystem::path log_file)
    : file_(std::move(log_file)),
      out_(file_, std::ios::app),
      endpoint_(std::move(opt), [this](const cdf::PluginEvent& ev) { record(ev); }) {}

void LoggingPlugin::record(const cdf::PluginEvent& ev) {
  if (!ev.update) return;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  AuditRecord r;
  r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  r.wall_time = iso_time(r.wall_ms);
  r.event_seq = ev.event_seq;
  r.host = ev.replica_id;
  r.replica_id = ev.update->id.replica_id;
  r.core_function = ev.core_function;
  r.update = cdf::hex_encode(cdf::encode_update(*ev.update));
  r.lamport = ev.update->lamport;
  r.epoch = ev.update->epoch;
  r.object_id = ev.update->object_id;

  std::lock_guard lock(mu_);
  out_ << audit_json(r) << '\n';
  out_.flush();
  if (!out_) {
    ++write_errors_;
    out_.clear();
    return;
  }
  ++records_;
}

std::uint64_t LoggingPlugin::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::uint64_t LoggingPlugin::write_errors() const {
  std::lock_guard lock(mu_);
  return write_errors_;
}

}  // namespace polyrdl::plugins
