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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ttt/backends.h"
#include "ttt/planner.h"
#include "ttt/state_table.h"

namespace ttt {

enum class FailureScenario {
  kMidGroupWriteFail,
  kVersionMismatch,
  kOwnerMapCollision,
  kStaleReadAttempt,
  kRollbackRetry,
};

std::string_view to_string(FailureScenario scenario);
FailureScenario parse_failure_scenario(std::string_view text);

// One injected failure. It fires on the first eligible group (or event)
// issued at or after `at_step`, targeting batch slot `slot`.
struct FailureSpec {
  FailureScenario scenario = FailureScenario::kMidGroupWriteFail;
  Step at_step = 0;
  std::size_t slot = 0;
};

// Per-slot input: the step's token and the tail of tokens completed since the
// last boundary (the step's token is not yet in it).
struct SlotInput {
  Vec x;
  TailBuffer tail;
};

struct GroupFailure {
  std::string reason;
  std::size_t slot = 0;
  bool injected = false;
  std::optional<Violation> violation;
};

struct GroupResult {
  std::vector<Vec> outputs;  // indexed by slot
  std::vector<std::pair<OwnerId, Version>> committed;
  std::optional<GroupFailure> failed;

  bool ok() const { return !failed.has_value(); }
};

class ExecutorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExecutorOptions {
  // Run batch slots of a group on OpenMP threads. Results are bit-identical to
  // the serial path because each slot's arithmetic is independent.
  bool parallel = false;
  // Run the groups passed to execute_groups on OpenMP threads. Callers must
  // only pass groups with pairwise disjoint owner sets.
  bool parallel_groups = false;
  // Test hook: with rollback disabled a failed write group only discards its
  // candidates, leaving already-published slots in place.
  bool rollback_enabled = true;
};

class Executor {
 public:
  Executor(StateTable& table, ExecutorOptions options = {});

  // Dispatches on the group's effect.
  GroupResult execute(const Group& group, std::span<const SlotInput> inputs);

  GroupResult execute_read_group(const Group& group,
                                 std::span<const SlotInput> inputs);

  // Snapshot, build evidence, stage candidates, then publish every member.
  // Any failure rolls all members back to their snapshots.
  GroupResult execute_write_group(const Group& group,
                                  std::span<const SlotInput> inputs);

  // Executes groups with pairwise disjoint owners; results[i] belongs to
  // groups[i]. Injected failures are assigned in group order before any group
  // runs, so the outcome does not depend on thread scheduling.
  std::vector<GroupResult> execute_groups(
      std::span<const Group> groups,
      std::span<const std::vector<SlotInput>> inputs);

  // Re-runs previously failed events one at a time in ready order. A failure
  // here is not recoverable and throws ExecutorError.
  std::vector<GroupResult> fallback_sequential(
      std::span<const Event> events, std::span<const SlotInput> inputs,
      Step issue_step);

  // Arms a write-path failure (MidGroupWriteFail or RollbackRetry). Fires
  // exactly once.
  void inject_failure(const FailureSpec& spec);
  bool failure_armed() const { return armed_.has_value(); }
  std::size_t failures_fired() const { return fired_; }

  const ExecutorOptions& options() const { return options_; }

 private:
  struct FaultPoint {
    std::optional<std::size_t> compute;
    std::optional<std::size_t> commit;
  };

  FaultPoint claim_faults(const Group& group);
  std::optional<std::size_t> take_injection(const Group& group,
                                            FailureScenario scenario);
  GroupResult write_impl(const Group& group, std::span<const SlotInput> inputs,
                         const FaultPoint& faults);
  void unwind(const Group& group);

  StateTable& table_;
  ExecutorOptions options_;
  std::optional<FailureSpec> armed_;
  std::size_t fired_ = 0;
};

}  // namespace ttt
