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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttt/costmodel.h"
#include "ttt/executor.h"
#include "ttt/planner.h"
#include "ttt/request.h"
#include "ttt/state_table.h"
#include "ttt/trace.h"

namespace ttt {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepRecord {
  std::size_t step = 0;  // 1-based decode step
  Effect rho = Effect::kRead;
  Version version_before = 0;
  Version version_after = 0;
  Step ready = 0;
  Step issue = 0;
};

struct CommitRecord {
  OwnerId owner;
  Version version = 0;
  std::size_t step = 0;
  Vec payload;
};

struct RequestRecord {
  OwnerId id;
  BackendType backend = BackendType::kFastWeight;
  std::size_t prompt_len = 0;
  std::size_t decode_len = 0;
  std::size_t chunk = 0;
  Step admitted_step = 0;
  Step prefill_ready = 0;
  Step prefill_issue = 0;
  Step finished_step = 0;

  std::vector<Vec> outputs;
  std::vector<StepRecord> steps;
  std::vector<CommitRecord> commits;

  Version final_version = 0;
  BackendPayload final_payload;
  std::size_t kv_tokens = 0;
  std::size_t position = 0;
  std::vector<Vec> tail_tokens;
  bool tail_cache_consistent = true;
};

struct EventCensus {
  std::size_t prefill = 0;
  std::size_t read = 0;
  std::size_t write = 0;
};

struct FailureRecord {
  FailureScenario scenario;
  Step step = 0;
  std::string group_key;
  std::vector<OwnerId> members;
  std::size_t slot = 0;
  std::string detail;
  std::string recovery;
};

// Invariants asserted while the loop runs.
struct InvariantVerdicts {
  bool phase_separation = true;
  bool bounded_wait = true;
  bool owner_isolation = true;
  bool group_atomicity = true;
  bool per_request_order = true;
  std::vector<std::string> notes;

  bool all() const {
    return phase_separation && bounded_wait && owner_isolation &&
           group_atomicity && per_request_order;
  }
};

struct RunReport {
  std::string mode;
  PlannerConfig planner;
  CostModel cost;
  std::uint64_t seed = 0;
  std::string pattern;

  std::size_t iterations = 0;
  double simulated_time = 0.0;
  std::size_t generated_tokens = 0;
  double throughput = 0.0;

  EventCensus census;
  std::map<std::size_t, std::size_t> prefill_group_sizes;
  std::map<std::size_t, std::size_t> read_group_sizes;
  std::map<std::size_t, std::size_t> write_group_sizes;
  std::map<Step, std::size_t> wait_histogram;
  Step max_wait = 0;

  std::size_t groups_issued = 0;
  std::size_t revalidations = 0;
  std::size_t rejected_groups = 0;
  std::size_t fallback_events = 0;

  std::vector<RequestRecord> requests;  // sorted by id
  std::vector<FailureRecord> failures;
  InvariantVerdicts invariants;
};

struct EngineOptions {
  // Execute the disjoint groups of one iteration on OpenMP threads.
  bool parallel_groups = false;
  // Execute batch slots within a group on OpenMP threads.
  bool parallel_slots = false;
  bool rollback_enabled = true;
  bool check_invariants = true;
};

struct StepOutcome {
  bool prefill = false;
  bool committed = false;
};

// Registers the stream's state at version 0 and returns it in Admitted.
Request admit(const TraceEntry& entry, StateTable& table, std::uint64_t seed);

// Post-step bookkeeping: KV count, decode position, tail and next input.
void update_kv_and_tail(Request& request, const StepOutcome& outcome,
                        std::uint64_t seed);

// The serving loop: extract events, plan, execute, return outputs, commit and
// update KV/tail metadata until every request finishes.
class Engine {
 public:
  explicit Engine(EngineOptions options = {});

  // Arms one failure for the next run; fires exactly once.
  void inject_failure(const FailureSpec& spec);

  RunReport run(const Trace& trace, const PlannerConfig& planner,
                const CostModel& cost, std::uint64_t seed);

  // `cost.replica_cap` independent serial engines over a round-robin split of
  // the streams. Elapsed time is the slowest replica's.
  RunReport run_replicas(const Trace& trace, const CostModel& cost,
                         std::uint64_t seed);

 private:
  EngineOptions options_;
  std::optional<FailureSpec> injection_;
};

}  // namespace ttt
