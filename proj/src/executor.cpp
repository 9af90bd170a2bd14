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

#include "ttt/executor.h"

#include <algorithm>
#include <numeric>

namespace ttt {

std::string_view to_string(FailureScenario scenario) {
  switch (scenario) {
    case FailureScenario::kMidGroupWriteFail:
      return "mid-group-write-fail";
    case FailureScenario::kVersionMismatch:
      return "version-mismatch";
    case FailureScenario::kOwnerMapCollision:
      return "owner-map-collision";
    case FailureScenario::kStaleReadAttempt:
      return "stale-read-attempt";
    case FailureScenario::kRollbackRetry:
      return "rollback-retry";
  }
  return "?";
}

FailureScenario parse_failure_scenario(std::string_view text) {
  for (auto s : {FailureScenario::kMidGroupWriteFail,
                 FailureScenario::kVersionMismatch,
                 FailureScenario::kOwnerMapCollision,
                 FailureScenario::kStaleReadAttempt,
                 FailureScenario::kRollbackRetry}) {
    if (text == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown failure scenario: " + std::string(text));
}

Executor::Executor(StateTable& table, ExecutorOptions options)
    : table_(table), options_(options) {}

void Executor::inject_failure(const FailureSpec& spec) {
  if (spec.scenario != FailureScenario::kMidGroupWriteFail &&
      spec.scenario != FailureScenario::kRollbackRetry) {
    throw std::invalid_argument("executor only injects write-path failures, got " +
                                std::string(to_string(spec.scenario)));
  }
  armed_ = spec;
}

std::optional<std::size_t> Executor::take_injection(const Group& group,
                                                    FailureScenario scenario) {
  if (!armed_ || armed_->scenario != scenario) return std::nullopt;
  if (group.issue_step < armed_->at_step || group.size() <= armed_->slot) {
    return std::nullopt;
  }
  const std::size_t slot = armed_->slot;
  armed_.reset();
  ++fired_;
  return slot;
}

GroupResult Executor::execute(const Group& group,
                              std::span<const SlotInput> inputs) {
  return group.key.rho == Effect::kRead ? execute_read_group(group, inputs)
                                        : execute_write_group(group, inputs);
}

namespace {

std::optional<GroupFailure> precheck(const Group& group, Effect effect,
                                     std::span<const SlotInput> inputs,
                                     const StateTable& table) {
  if (group.key.rho != effect) {
    return GroupFailure{"wrong effect for this executor path", 0, false,
                        std::nullopt};
  }
  if (inputs.size() != group.size()) {
    return GroupFailure{"input count differs from group size", 0, false,
                        std::nullopt};
  }
  // Only member versions are consulted so concurrent groups on disjoint
  // owners never read each other's records.
  VersionTable members;
  for (OwnerId owner : group.owner_map) {
    if (table.contains(owner)) {
      members.emplace(owner, table.committed_version(owner));
    }
  }
  if (auto v = validate_group(group, members)) {
    return GroupFailure{std::string(to_string(v->kind)) + ": " + v->detail,
                        v->slot, false, v};
  }
  return std::nullopt;
}

}  // namespace

GroupResult Executor::execute_read_group(const Group& group,
                                         std::span<const SlotInput> inputs) {
  GroupResult result;
  if (auto f = precheck(group, Effect::kRead, inputs, table_)) {
    result.failed = std::move(f);
    return result;
  }
  const auto n = static_cast<std::ptrdiff_t>(group.size());
  result.outputs.resize(group.size());
  if (is_prefill(group.key)) return result;

  std::vector<std::string> errors(group.size());
#pragma omp parallel for schedule(static) if (options_.parallel && n > 1)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    try {
      const StateView view = table_.read_view(group.owner_map[b]);
      result.outputs[b] = apply_read(*view.payload, inputs[b].x);
    } catch (const std::exception& e) {
      errors[b] = e.what();
    }
  }
  for (std::size_t b = 0; b < errors.size(); ++b) {
    if (!errors[b].empty()) {
      result.outputs.clear();
      result.failed = GroupFailure{errors[b], b, false, std::nullopt};
      break;
    }
  }
  return result;
}

void Executor::unwind(const Group& group) {
  for (OwnerId owner : group.owner_map) {
    if (options_.rollback_enabled) {
      table_.rollback(owner);
    } else {
      table_.abort_write(owner);
    }
  }
}

GroupResult Executor::execute_write_group(const Group& group,
                                          std::span<const SlotInput> inputs) {
  GroupResult result;
  if (auto f = precheck(group, Effect::kWrite, inputs, table_)) {
    result.failed = std::move(f);
    return result;
  }
  return write_impl(group, inputs, claim_faults(group));
}

Executor::FaultPoint Executor::claim_faults(const Group& group) {
  if (group.key.rho != Effect::kWrite) return {};
  FaultPoint f;
  f.compute = take_injection(group, FailureScenario::kRollbackRetry);
  f.commit = take_injection(group, FailureScenario::kMidGroupWriteFail);
  return f;
}

GroupResult Executor::write_impl(const Group& group,
                                 std::span<const SlotInput> inputs,
                                 const FaultPoint& faults) {
  GroupResult result;
  if (auto f = precheck(group, Effect::kWrite, inputs, table_)) {
    result.failed = std::move(f);
    return result;
  }
  const auto& compute_fault = faults.compute;
  const auto& commit_fault = faults.commit;

  const auto n = static_cast<std::ptrdiff_t>(group.size());
  result.outputs.resize(group.size());
  std::vector<std::string> errors(group.size());

  // Stage: every slot snapshots, emits its output against the committed
  // payload and parks a dirty candidate. Nothing is visible yet.
#pragma omp parallel for schedule(static) if (options_.parallel && n > 1)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    const OwnerId owner = group.owner_map[b];
    try {
      table_.snapshot(owner);
      const StateView read = table_.read_view(owner);
      result.outputs[b] = apply_read(*read.payload, inputs[b].x);
      TailBuffer full = tail_append(inputs[b].tail, inputs[b].x);
      const StateView view = table_.write_view(owner, make_evidence(full));
      if (compute_fault && *compute_fault == static_cast<std::size_t>(b)) {
        throw ExecutorError("injected boundary-update failure");
      }
      table_.populate_candidate(view);
    } catch (const std::exception& e) {
      errors[b] = e.what();
    }
  }

  for (std::size_t b = 0; b < errors.size(); ++b) {
    if (errors[b].empty()) continue;
    const bool injected = compute_fault && *compute_fault == b;
    unwind(group);
    result.outputs.clear();
    result.failed = GroupFailure{errors[b], b, injected, std::nullopt};
    return result;
  }

  // Publish. Single-threaded callers observe either no commit or all of them.
  for (std::size_t b = 0; b < group.size(); ++b) {
    if (commit_fault && *commit_fault == b) {
      unwind(group);
      result.outputs.clear();
      result.committed.clear();
      result.failed =
          GroupFailure{"injected commit failure", b, true, std::nullopt};
      return result;
    }
    const OwnerId owner = group.owner_map[b];
    result.committed.emplace_back(owner, table_.commit(owner));
  }
  return result;
}

std::vector<GroupResult> Executor::execute_groups(
    std::span<const Group> groups,
    std::span<const std::vector<SlotInput>> inputs) {
  if (groups.size() != inputs.size()) {
    throw ExecutorError("execute_groups: input count differs from group count");
  }
  std::vector<FaultPoint> faults;
  faults.reserve(groups.size());
  for (const auto& g : groups) faults.push_back(claim_faults(g));

  std::vector<GroupResult> results(groups.size());
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(dynamic) if (options_.parallel_groups && n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    results[i] = groups[i].key.rho == Effect::kRead
                     ? execute_read_group(groups[i], inputs[i])
                     : write_impl(groups[i], inputs[i], faults[i]);
  }
  return results;
}

std::vector<GroupResult> Executor::fallback_sequential(
    std::span<const Event> events, std::span<const SlotInput> inputs,
    Step issue_step) {
  if (events.size() != inputs.size()) {
    throw ExecutorError("fallback: input count differs from event count");
  }
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = events[a];
    const auto& eb = events[b];
    return ea.ready_step != eb.ready_step ? ea.ready_step < eb.ready_step
                                          : ea.request < eb.request;
  });

  std::vector<GroupResult> results(events.size());
  for (std::size_t i : order) {
    const Group single = make_group(key_of(events[i]), {events[i]}, issue_step);
    results[i] = execute(single, inputs.subspan(i, 1));
    if (!results[i].ok()) {
      throw ExecutorError("fallback failed for " + to_string(events[i].request) +
                          ": " + results[i].failed->reason);
    }
  }
  return results;
}

}  // namespace ttt
