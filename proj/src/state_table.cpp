/* Copyright 2026 The ttt-serve Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "ttt/state_table.h"

namespace ttt {

std::string_view to_string(StateErrc code) {
  switch (code) {
    case StateErrc::kUnknownOwner:
      return "unknown-owner";
    case StateErrc::kDuplicateOwner:
      return "duplicate-owner";
    case StateErrc::kReleasedOwner:
      return "released-owner";
    case StateErrc::kDoubleWrite:
      return "double-write";
    case StateErrc::kNoCandidate:
      return "no-candidate";
    case StateErrc::kNoCheckpoint:
      return "no-checkpoint";
    case StateErrc::kBadView:
      return "bad-view";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(StateErrc code, OwnerId owner, std::string_view what) {
  throw StateError(code, std::string(to_string(code)) + " (" +
                             to_string(owner) + "): " + std::string(what));
}

}  // namespace

TTTStateRecord& StateTable::get(OwnerId owner) {
  auto it = records_.find(owner);
  if (it == records_.end()) fail(StateErrc::kUnknownOwner, owner, "not registered");
  return it->second;
}

const TTTStateRecord& StateTable::get(OwnerId owner) const {
  auto it = records_.find(owner);
  if (it == records_.end()) fail(StateErrc::kUnknownOwner, owner, "not registered");
  return it->second;
}

void StateTable::check_new(OwnerId owner) const {
  if (records_.contains(owner)) {
    fail(StateErrc::kDuplicateOwner, owner, "already registered");
  }
  if (released_.contains(owner)) {
    fail(StateErrc::kReleasedOwner, owner, "owner ids are never reused");
  }
}

const TTTStateRecord& StateTable::register_state(OwnerId owner,
                                                 BackendType type,
                                                 OperatorShapeClass shape,
                                                 BackendPayload init_payload,
                                                 std::string placement) {
  check_new(owner);
  if (backend_of(init_payload) != type) {
    throw BackendError("initial payload does not match backend type " +
                       std::string(to_string(type)));
  }
  if (hidden_of(init_payload) != shape.hidden) {
    throw BackendError("initial payload does not match shape " +
                       to_string(shape));
  }
  TTTStateRecord rec;
  rec.owner = owner;
  rec.backend_type = type;
  rec.shape = std::move(shape);
  rec.placement = std::move(placement);
  rec.payload = std::move(init_payload);
  return records_.emplace(owner, std::move(rec)).first->second;
}

StateView StateTable::read_view(OwnerId owner) const {
  const auto& rec = get(owner);
  return StateView{owner, rec.version, ViewMode::kRead, &rec.payload,
                   std::nullopt};
}

StateView StateTable::write_view(OwnerId owner, UpdateEvidence evidence) {
  auto& rec = get(owner);
  if (rec.write_open || rec.dirty_candidate) {
    fail(StateErrc::kDoubleWrite, owner, "a write is already pending");
  }
  rec.write_open = true;
  return StateView{owner, rec.version, ViewMode::kWrite, &rec.payload,
                   std::move(evidence)};
}

void StateTable::populate_candidate(const StateView& view) {
  if (view.mode != ViewMode::kWrite || !view.evidence) {
    fail(StateErrc::kBadView, view.owner, "candidate requires a write view");
  }
  const auto& rec = get(view.owner);
  stage_candidate(view, boundary_update(rec.payload, *view.evidence));
}

void StateTable::stage_candidate(const StateView& view,
                                 BackendPayload candidate) {
  auto& rec = get(view.owner);
  if (view.mode != ViewMode::kWrite || !rec.write_open ||
      view.version != rec.version || view.payload != &rec.payload) {
    fail(StateErrc::kBadView, view.owner, "stale or non-write view");
  }
  if (rec.dirty_candidate) {
    fail(StateErrc::kDoubleWrite, view.owner, "candidate already staged");
  }
  rec.dirty_candidate = std::move(candidate);
}

Version StateTable::commit(OwnerId owner) {
  auto& rec = get(owner);
  if (!rec.dirty_candidate) {
    fail(StateErrc::kNoCandidate, owner, "nothing to commit");
  }
  rec.payload = std::move(*rec.dirty_candidate);
  rec.dirty_candidate.reset();
  rec.write_open = false;
  return ++rec.version;
}

void StateTable::abort_write(OwnerId owner) {
  auto& rec = get(owner);
  rec.dirty_candidate.reset();
  rec.write_open = false;
}

void StateTable::snapshot(OwnerId owner) {
  auto& rec = get(owner);
  rec.checkpoint = Checkpoint{rec.version, rec.payload};
}

Version StateTable::rollback(OwnerId owner) {
  auto& rec = get(owner);
  if (!rec.checkpoint) fail(StateErrc::kNoCheckpoint, owner, "no snapshot");
  rec.payload = rec.checkpoint->payload;
  rec.version = rec.checkpoint->version;
  rec.dirty_candidate.reset();
  rec.write_open = false;
  return rec.version;
}

const TTTStateRecord& StateTable::fork(OwnerId owner, OwnerId new_owner) {
  const auto& src = get(owner);
  check_new(new_owner);
  TTTStateRecord copy;
  copy.owner = new_owner;
  copy.backend_type = src.backend_type;
  copy.shape = src.shape;
  copy.version = src.version;
  copy.placement = src.placement;
  copy.payload = src.payload;
  return records_.emplace(new_owner, std::move(copy)).first->second;
}

void StateTable::release(OwnerId owner) {
  get(owner);
  records_.erase(owner);
  released_.insert(owner);
}

const TTTStateRecord& StateTable::record(OwnerId owner) const {
  return get(owner);
}

Version StateTable::committed_version(OwnerId owner) const {
  return get(owner).version;
}

VersionTable StateTable::versions() const {
  VersionTable out;
  for (const auto& [id, rec] : records_) out.emplace(id, rec.version);
  return out;
}

const OperatorShapeClass& shape_class(const TTTStateRecord& record) {
  return record.shape;
}

}  // namespace ttt
