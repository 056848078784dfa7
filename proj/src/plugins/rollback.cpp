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

#include "polyrdl/plugins/rollback.hpp"

#include "polyrdl/core/error.hpp"
#include "polyrdl/persist/storage.hpp"
#include "polyrdl/plugin/protocol.hpp"

namespace polyrdl::plugins {

std::string_view to_string(RollbackCode c) {
  switch (c) {
    case RollbackCode::kOk: return "OK";
    case RollbackCode::kUnknownCheckpoint: return "UNKNOWN_CHECKPOINT";
    case RollbackCode::kDuplicateLabel: return "DUPLICATE_LABEL";
    case RollbackCode::kBadLabel: return "BAD_LABEL";
    case RollbackCode::kCommandFailed: return "COMMAND_FAILED";
  }
  return "?";
}

RollbackPlugin::RollbackPlugin(plugin::EndpointOptions opt, std::filesystem::path store)
    : store_(std::move(store)), endpoint_(std::move(opt), nullptr) {}

RollbackResult RollbackPlugin::checkpoint(const std::string& label) {
  if (!persist::valid_label(label)) return {RollbackCode::kBadLabel, std::nullopt, "bad label " + label};
  plugin::CommandReply r = endpoint_.call("access", plugin::encode_access_args({"", std::nullopt}));
  if (r.error || !r.event) {
    return {RollbackCode::kCommandFailed, std::nullopt, r.error ? r.error->message : "no reply"};
  }
  try {
    const plugin::SnapshotReply s = plugin::decode_snapshot_reply(r.event->result_view);
    persist::write_checkpoint(store_, {label, r.event->replica_id, s.epoch, s.clock, s.version_vector, s.state});
  } catch (const Error& e) {
    if (e.code() == Errc::kDuplicateLabel) return {RollbackCode::kDuplicateLabel, std::nullopt, e.what()};
    return {RollbackCode::kCommandFailed, std::nullopt, e.what()};
  } catch (const cdf::DecodeError& e) {
    return {RollbackCode::kCommandFailed, std::nullopt, e.what()};
  }
  return {};
}

RollbackResult RollbackPlugin::restore(const std::string& label) {
  persist::Checkpoint c;
  try {
    c = persist::read_checkpoint(store_, label);
  } catch (const Error& e) {
    if (e.code() == Errc::kUnknownCheckpoint) return {RollbackCode::kUnknownCheckpoint, std::nullopt, e.what()};
    return {RollbackCode::kCommandFailed, std::nullopt, e.what()};
  }
  // The host picks the epoch; the one given here is advisory.
  plugin::UpdateArgs args{"", ObjectType::kCounter, op::Reset{c.epoch + 1, std::move(c.body)}};
  plugin::CommandReply r = endpoint_.call("update", plugin::encode_update_args(args));
  if (r.error || !r.event || !r.event->update) {
    return {RollbackCode::kCommandFailed, std::nullopt, r.error ? r.error->message : "no update in reply"};
  }
  RollbackResult res{RollbackCode::kOk, *r.event->update, {}};
  plugin::CommandReply s = endpoint_.call("sync", {});
  if (s.error) {
    res.code = RollbackCode::kCommandFailed;
    res.message = "reset issued, sync failed: " + s.error->message;
  }
  return res;
}

}  // namespace polyrdl::plugins
