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

#include "polyrdl/core/replica.hpp"

#include <algorithm>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/digest.hpp"
#include "polyrdl/core/error.hpp"

namespace polyrdl {

std::string to_hex(const Digest& d) { return cdf::hex_encode(d); }

std::string_view to_string(ApplyResult r) {
  switch (r) {
    case ApplyResult::kApplied:
      return "APPLIED";
    case ApplyResult::kDuplicate:
      return "DUPLICATE";
    case ApplyResult::kStaleEpoch:
      return "STALE_EPOCH";
    case ApplyResult::kDeferred:
      return "DEFERRED";
  }
  return "?";
}

Replica::Replica(std::string replica_id, ReplicaConfig config) : id_(std::move(replica_id)), config_(config) {
  if (!valid_replica_id(id_)) {
    throw Error(Errc::kInvalidArgument, "replica id must be nonempty UTF-8 of at most 64 bytes");
  }
}

Replica Replica::from_image(const ReplicaImage& image, ReplicaConfig config) {
  Replica r(image.replica_id, config);
  r.epoch_ = image.epoch;
  r.clock_ = image.clock;
  r.next_seq_ = image.next_seq;
  r.known_ = image.known;
  r.objects_ = cdf::decode_state(image.objects);
  r.log_ = image.log;
  r.rebuild_reset_stamp();
  return r;
}

ReplicaImage Replica::image() const {
  return ReplicaImage{id_, epoch_, clock_, next_seq_, known_, encode_state(), log_};
}

void Replica::rebuild_reset_stamp() {
  reset_stamp_.reset();
  for (const auto& u : log_) {
    if (u.is_reset() && u.epoch == epoch_ && (!reset_stamp_ || *reset_stamp_ < u.stamp())) reset_stamp_ = u.stamp();
  }
}

ValueView Replica::access(std::string_view object_id, std::optional<ObjectType> hint) const {
  auto it = objects_.find(std::string(object_id));
  if (it == objects_.end()) return hint ? empty_view(*hint) : ValueView{AbsentView{}};
  return resolve(it->second);
}

Update Replica::local_update(std::string object_id, ObjectType type, OpPayload op) {
  const OpKind kind = op_kind(op);
  if (kind == OpKind::kReset) throw Error(Errc::kResetNotAllowed, "Reset is issued only through rollback");
  if (!op_legal_for(type, kind)) {
    throw Error(Errc::kTypeMismatch,
                std::string(to_string(kind)) + " is not legal for a " + std::string(to_string(type)));
  }
  Update u{{id_, next_seq_}, clock_ + 1, epoch_, std::move(object_id), type, std::move(op)};
  if (auto diag = validate_update(u); !diag.empty()) throw Error(Errc::kInvalidArgument, diag);
  ++clock_;
  ++next_seq_;
  commit(u, CommitOrigin::kLocal, nullptr);
  return u;
}

Update Replica::issue_reset(Bytes snapshot) {
  core::ObjectStore decoded;
  try {
    decoded = cdf::decode_state(snapshot);
  } catch (const cdf::DecodeError& e) {
    throw Error(Errc::kInvalidArgument, std::string("reset snapshot: ") + e.what());
  }
  const std::uint64_t new_epoch = epoch_ + 1;
  Update u{{id_, next_seq_}, clock_ + 1, new_epoch, "", ObjectType::kCounter,
           op::Reset{new_epoch, std::move(snapshot)}};
  ++clock_;
  ++next_seq_;
  commit(u, CommitOrigin::kLocal, &decoded);
  return u;
}

ApplyResult Replica::apply_update(const Update& u) {
  if (auto diag = validate_update(u); !diag.empty()) throw Error(Errc::kMalformedUpdate, diag);
  if (u.epoch < epoch_) {
    known_.add(u.id);
    return ApplyResult::kStaleEpoch;
  }
  if (known_.contains(u.id)) return ApplyResult::kDuplicate;
  if (u.epoch > epoch_ && !u.is_reset()) {
    if (deferred_.size() < config_.max_deferred) deferred_.try_emplace(u.id, u);
    return ApplyResult::kDeferred;
  }
  if (u.is_reset()) {
    core::ObjectStore decoded;
    try {
      decoded = cdf::decode_state(std::get<op::Reset>(u.op).snapshot);
    } catch (const cdf::DecodeError& e) {
      throw Error(Errc::kMalformedUpdate, std::string("reset snapshot: ") + e.what());
    }
    commit(u, CommitOrigin::kRemote, &decoded);
  } else {
    commit(u, CommitOrigin::kRemote, nullptr);
  }
  return ApplyResult::kApplied;
}

void Replica::commit(const Update& u, CommitOrigin origin, const core::ObjectStore* decoded_reset) {
  const bool views = listener_ && listener_views_ && !u.is_reset();
  ValueView before, after;
  if (views) before = access(u.object_id);

  clock_ = std::max(clock_, u.lamport);
  if (u.id.replica_id == id_) next_seq_ = std::max(next_seq_, u.id.seq + 1);
  known_.add(u.id);
  if (u.is_reset()) {
    apply_reset(u, *decoded_reset);
  } else {
    core::apply_op(objects_, u);
  }
  log_.push_back(u);
  ++commit_count_;

  if (views) after = access(u.object_id);
  if (listener_) listener_(Commit{u, origin, views ? &before : nullptr, views ? &after : nullptr});
  if (u.is_reset()) release_deferred();
}

void Replica::apply_reset(const Update& u, core::ObjectStore decoded) {
  const auto& reset = std::get<op::Reset>(u.op);
  if (reset.new_epoch > epoch_) {
    objects_ = std::move(decoded);
    epoch_ = reset.new_epoch;
    std::erase_if(log_, [&](const Update& l) { return l.epoch < epoch_; });
    reset_stamp_ = u.stamp();
    return;
  }
  // Concurrent Reset into the same epoch: the greater stamp provides the
  // baseline and every other update of the epoch is folded on top of it.
  if (reset_stamp_ && u.stamp() < *reset_stamp_) return;
  objects_ = std::move(decoded);
  for (const auto& l : log_) {
    if (!l.is_reset()) core::apply_op(objects_, l);
  }
  reset_stamp_ = u.stamp();
}

void Replica::release_deferred() {
  std::vector<Update> ready;
  for (auto it = deferred_.begin(); it != deferred_.end();) {
    if (it->second.epoch > epoch_) {
      ++it;
      continue;
    }
    if (it->second.epoch == epoch_) {
      ready.push_back(std::move(it->second));
    } else {
      known_.add(it->first);  // overtaken by a later Reset, now stale
    }
    it = deferred_.erase(it);
  }
  for (const auto& u : ready) {
    if (!known_.contains(u.id)) commit(u, CommitOrigin::kRemote, nullptr);
  }
}

Bytes Replica::encode_state() const { return cdf::encode_state(objects_); }

Digest Replica::digest() const { return cdf::sha256(encode_state()); }

void Replica::set_commit_listener(CommitListener listener, bool with_views) {
  listener_ = std::move(listener);
  listener_views_ = with_views;
}

}  // namespace polyrdl
