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

#include "polyrdl/service/node.hpp"

#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/error.hpp"

namespace polyrdl::service {

namespace {

cdf::PluginError error_reply(std::uint64_t ref, std::uint16_t code, std::string message) {
  return cdf::PluginError{ref, code, std::move(message)};
}

}  // namespace

Node::Node(NodeOptions opt) : opt_(std::move(opt)) {
  if (opt_.data_dir) {
    std::filesystem::create_directories(*opt_.data_dir);
    storage_ = std::make_unique<persist::Storage>(*opt_.data_dir, opt_.fsync);
    replica_.emplace(storage_->recover(opt_.id, opt_.replica));
    recovery_ = storage_->info();
  } else {
    replica_.emplace(opt_.id, opt_.replica);
  }
  replica_->set_commit_listener([this](const Commit& c) { on_commit(c); }, false);
}

Node::~Node() {
  if (replica_) replica_->set_commit_listener({});
}

void Node::set_broadcast(BroadcastFn fn) {
  std::lock_guard lock(mu_);
  broadcast_ = std::move(fn);
}

void Node::set_event_sink(EventSink sink) {
  std::lock_guard lock(mu_);
  sink_ = std::move(sink);
  // Before/after views cost a full resolve of the object; only pay for them
  // when someone listens.
  replica_->set_commit_listener([this](const Commit& c) { on_commit(c); }, static_cast<bool>(sink_));
}

void Node::check_running() const {
  if (halted_) throw Error(Errc::kHalted, "replica " + opt_.id + " stopped after a storage failure");
}

void Node::on_commit(const Commit& c) {
  if (storage_) {
    try {
      storage_->append(c.update);
    } catch (const Error&) {
      halted_ = true;
      throw;
    }
    ++since_snapshot_;
  }
  if (c.origin == CommitOrigin::kLocal) ++local_commits_;
  if (sink_) {
    Bytes view;
    if (c.before && c.after) view = plugin::encode_change({*c.before, *c.after});
    sink_(c.origin == CommitOrigin::kLocal ? "update" : "merge", &c.update, std::move(view));
  }
}

void Node::maybe_snapshot() {
  if (storage_ && opt_.snapshot_every > 0 && since_snapshot_ >= opt_.snapshot_every) {
    storage_->write_snapshot(*replica_);
    since_snapshot_ = 0;
  }
}

ValueView Node::access(std::string_view object_id, std::optional<ObjectType> hint) {
  std::lock_guard lock(mu_);
  ValueView v = replica_->access(object_id, hint);
  if (sink_) sink_("access", nullptr, cdf::encode_view(v));
  return v;
}

Update Node::update(std::string object_id, ObjectType type, OpPayload op) {
  std::lock_guard lock(mu_);
  check_running();
  Update u = replica_->local_update(std::move(object_id), type, std::move(op));
  maybe_snapshot();
  return u;
}

Update Node::reset(Bytes snapshot) {
  std::lock_guard lock(mu_);
  check_running();
  return replica_->issue_reset(std::move(snapshot));
}

cdf::SyncMessage Node::sync() {
  cdf::SyncMessage m;
  BroadcastFn out;
  Bytes frame;
  {
    std::lock_guard lock(mu_);
    check_running();
    m = sync::make_sync(*replica_);
    const Bytes payload = cdf::encode_sync(m);
    frame = cdf::encode_frame(cdf::MsgType::kSync, payload);
    out = broadcast_;
    if (sink_) sink_("sync", nullptr, plugin::encode_sync_stats({m.updates.size(), payload.size(), m.sender_epoch}));
  }
  // Outside the lock: a simulated network may deliver synchronously.
  if (out) out(frame);
  return m;
}

sync::MergeReport Node::merge(const cdf::SyncMessage& m) {
  std::lock_guard lock(mu_);
  check_running();
  sync::MergeReport rep = sync::merge_sync(*replica_, m);
  merge_totals_ += rep;
  maybe_snapshot();
  return rep;
}

void Node::on_frame(const cdf::Frame& f) {
  if (f.type != cdf::MsgType::kSync) return;
  merge(cdf::decode_sync(f.payload));
}

Bytes Node::sync_frame() {
  std::lock_guard lock(mu_);
  return cdf::encode_frame(cdf::MsgType::kSync, cdf::encode_sync(sync::make_sync(*replica_)));
}

std::uint64_t Node::write_snapshot() {
  std::lock_guard lock(mu_);
  if (!storage_) throw Error(Errc::kInvalidArgument, "node has no data directory");
  since_snapshot_ = 0;
  return storage_->write_snapshot(*replica_);
}

void Node::checkpoint(const std::string& label) {
  std::lock_guard lock(mu_);
  if (!storage_) throw Error(Errc::kInvalidArgument, "node has no data directory");
  storage_->checkpoint(label, *replica_);
}

Digest Node::digest() const {
  std::lock_guard lock(mu_);
  return replica_->digest();
}

std::uint64_t Node::epoch() const {
  std::lock_guard lock(mu_);
  return replica_->epoch();
}

Bytes Node::encode_state() const {
  std::lock_guard lock(mu_);
  return replica_->encode_state();
}

plugin::SnapshotReply Node::snapshot() const {
  std::lock_guard lock(mu_);
  return {replica_->epoch(), replica_->clock(), replica_->known().entries(), replica_->encode_state()};
}

void Node::inspect(const std::function<void(const Replica&)>& fn) const {
  std::lock_guard lock(mu_);
  fn(*replica_);
}

std::uint64_t Node::local_commits() const {
  std::lock_guard lock(mu_);
  return local_commits_;
}

plugin::CommandReply Node::execute(const cdf::PluginCommand& cmd) {
  try {
    return run_command(cmd);
  } catch (const cdf::DecodeError& e) {
    return {std::nullopt, error_reply(cmd.cmd_seq, plugin::kBadArgs, e.what())};
  } catch (const Error& e) {
    return {std::nullopt, error_reply(cmd.cmd_seq, static_cast<std::uint16_t>(plugin::kCoreErrorBase +
                                                                               static_cast<std::uint16_t>(e.code())),
                                      e.what())};
  }
}

plugin::CommandReply Node::run_command(const cdf::PluginCommand& cmd) {
  cdf::PluginEvent ev;
  ev.reply_to = cmd.cmd_seq;
  ev.core_function = cmd.core_function;
  ev.replica_id = opt_.id;

  if (cmd.core_function == "access") {
    const auto args = plugin::decode_access_args(cmd.args);
    if (args.object_id.empty()) {
      ev.result_view = plugin::encode_snapshot_reply(snapshot());
    } else {
      ev.result_view = cdf::encode_view(access(args.object_id, args.hint));
    }
  } else if (cmd.core_function == "update") {
    auto args = plugin::decode_update_args(cmd.args);
    std::lock_guard lock(mu_);
    check_running();
    if (auto* reset = std::get_if<op::Reset>(&args.op)) {
      ev.update = replica_->issue_reset(std::move(reset->snapshot));
    } else {
      const ValueView before = replica_->access(args.object_id);
      ev.update = replica_->local_update(args.object_id, args.object_type, std::move(args.op));
      ev.result_view = plugin::encode_change({before, replica_->access(args.object_id)});
      maybe_snapshot();
    }
  } else if (cmd.core_function == "sync") {
    if (!cmd.args.empty()) return {std::nullopt, error_reply(cmd.cmd_seq, plugin::kBadArgs, "sync takes no arguments")};
    const cdf::SyncMessage m = sync();
    ev.result_view = plugin::encode_sync_stats({m.updates.size(), cdf::encode_sync(m).size(), m.sender_epoch});
  } else if (cmd.core_function == "merge") {
    const sync::MergeReport rep = merge(cdf::decode_sync(cmd.args));
    ev.result_view = plugin::encode_merge_stats({rep.applied, rep.duplicates, rep.stale, rep.deferred, rep.error});
  } else {
    return {std::nullopt, error_reply(cmd.cmd_seq, plugin::kUnknownFunction, "no core function " + cmd.core_function)};
  }
  return {std::move(ev), std::nullopt};
}

}  // namespace polyrdl::service
