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

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "ttt/backends.h"
#include "ttt/types.h"

namespace ttt {

enum class StateErrc {
  kUnknownOwner,
  kDuplicateOwner,
  kReleasedOwner,
  kDoubleWrite,
  kNoCandidate,
  kNoCheckpoint,
  kBadView,
};

std::string_view to_string(StateErrc code);

class StateError : public std::runtime_error {
 public:
  StateError(StateErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  StateErrc code() const { return code_; }

 private:
  StateErrc code_;
};

struct Checkpoint {
  Version version = 0;
  BackendPayload payload;
};

// One owner's versioned mutable state. `payload` is the committed value;
// `dirty_candidate` is never reachable through a read view.
struct TTTStateRecord {
  OwnerId owner;
  BackendType backend_type = BackendType::kFastWeight;
  OperatorShapeClass shape;
  Version version = 0;
  std::string placement;
  BackendPayload payload;
  bool write_open = false;
  std::optional<BackendPayload> dirty_candidate;
  std::optional<Checkpoint> checkpoint;
};

enum class ViewMode { kRead, kWrite };

// Borrowed view of a committed payload. Invalidated by any commit, rollback
// or release of the same owner.
struct StateView {
  OwnerId owner;
  Version version = 0;
  ViewMode mode = ViewMode::kRead;
  const BackendPayload* payload = nullptr;
  std::optional<UpdateEvidence> evidence;
};

using VersionTable = std::map<OwnerId, Version>;

// Owner-indexed store of TTT states.
//
// Concurrency: distinct owners may be read and mutated from different threads
// once registered (no insertion or erasure may run concurrently). Operations
// on one owner must be externally serialized.
class StateTable {
 public:
  const TTTStateRecord& register_state(OwnerId owner, BackendType type,
                                       OperatorShapeClass shape,
                                       BackendPayload init_payload,
                                       std::string placement);

  StateView read_view(OwnerId owner) const;
  StateView write_view(OwnerId owner, UpdateEvidence evidence);

  // Runs the backend update on the view's committed payload and parks the
  // result as the owner's dirty candidate.
  void populate_candidate(const StateView& view);
  // Parks an externally computed candidate (tests and failure injection).
  void stage_candidate(const StateView& view, BackendPayload candidate);

  Version commit(OwnerId owner);
  // Discards an open write without touching the committed state.
  void abort_write(OwnerId owner);

  void snapshot(OwnerId owner);
  // Restores the checkpoint; the checkpoint is retained for later rollbacks.
  Version rollback(OwnerId owner);

  const TTTStateRecord& fork(OwnerId owner, OwnerId new_owner);

  // Drops the record; the id may not be registered again.
  void release(OwnerId owner);

  bool contains(OwnerId owner) const { return records_.contains(owner); }
  std::size_t size() const { return records_.size(); }
  const TTTStateRecord& record(OwnerId owner) const;
  Version committed_version(OwnerId owner) const;
  VersionTable versions() const;

  // Test hook: direct mutable access for corruption experiments.
  TTTStateRecord& mutable_record_for_testing(OwnerId owner) {
    return get(owner);
  }

 private:
  TTTStateRecord& get(OwnerId owner);
  const TTTStateRecord& get(OwnerId owner) const;
  void check_new(OwnerId owner) const;

  std::map<OwnerId, TTTStateRecord> records_;
  std::set<OwnerId> released_;
};

// Kernel-relevant dimensions used as a compatibility-key component.
const OperatorShapeClass& shape_class(const TTTStateRecord& record);

}  // namespace ttt
