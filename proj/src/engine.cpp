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

#include "ttt/engine.h"

#include <algorithm>
#include <utility>

namespace ttt {

Request admit(const TraceEntry& entry, StateTable& table, std::uint64_t seed) {
  const OwnerId id{entry.stream_id};
  OperatorShapeClass shape;
  shape.hidden = entry.hidden;
  shape.chunk = entry.chunk;
  shape.rank = entry.backend == BackendType::kDeltaAdapter ? entry.rank : 0;
  table.register_state(
      id, entry.backend, shape,
      initial_payload(entry.backend, entry.hidden, entry.rank, id, seed),
      entry.placement);

  Request r;
  r.id = id;
  r.state_ref = id;
  r.backend = entry.backend;
  r.shape = std::move(shape);
  r.placement = entry.placement;
  r.phase = RequestPhase::kAdmitted;
  r.tail.capacity = entry.chunk;
  r.prompt_len = entry.prompt_len;
  r.decode_target = entry.decode_len;
  r.tail_offset = entry.tail_offset;
  r.arrival_step = entry.arrival_step;
  return r;
}

void update_kv_and_tail(Request& r, const StepOutcome& outcome,
                        std::uint64_t seed) {
  const std::size_t d = r.shape.hidden;
  if (outcome.prefill) {
    r.kv_tokens = r.prompt_len;
    r.position = 0;
    r.tail.tokens.clear();
    for (std::size_t pos = r.prompt_len - r.tail_offset; pos < r.prompt_len;
         ++pos) {
      r.tail = tail_append(std::move(r.tail), gen_token(r.id, pos, seed, d));
    }
    r.x = gen_token(r.id, r.next_token_position(), seed, d);
    r.phase = r.decode_target == 0 ? RequestPhase::kFinished
                                   : RequestPhase::kDecode;
    return;
  }
  ++r.kv_tokens;
  if (outcome.committed) {
    r.tail.tokens.clear();
  } else {
    r.tail = tail_append(std::move(r.tail), r.x);
  }
  ++r.position;
  r.x = gen_token(r.id, r.next_token_position(), seed, d);
  if (r.position >= r.decode_target) r.phase = RequestPhase::kFinished;
}

Engine::Engine(EngineOptions options) : options_(options) {}

void Engine::inject_failure(const FailureSpec& spec) { injection_ = spec; }

namespace {

struct Snapshot {
  Version version;
  Vec payload;
};

std::string recovery_text(bool rollback, std::size_t members) {
  return std::string(rollback ? "rolled back all members"
                              : "discarded candidates without rollback") +
         "; re-executed as " + std::to_string(members) + " singleton groups";
}

}  // namespace

RunReport Engine::run(const Trace& trace, const PlannerConfig& planner_config,
                      const CostModel& cost, std::uint64_t seed) {
  validate_trace(trace);
  cost.validate();
  std::optional<FailureSpec> injection = std::exchange(injection_, std::nullopt);

  StateTable table;
  Executor exec(table, ExecutorOptions{options_.parallel_slots,
                                       options_.parallel_groups,
                                       options_.rollback_enabled});
  const bool executor_injection =
      injection && (injection->scenario == FailureScenario::kMidGroupWriteFail ||
                    injection->scenario == FailureScenario::kRollbackRetry);
  if (executor_injection) exec.inject_failure(*injection);
  bool engine_injection_fired = false;

  Planner planner(planner_config);
  Clock clock;

  RunReport rep;
  rep.mode = std::string(to_string(planner_config.mode));
  rep.planner = planner_config;
  rep.cost = cost;
  rep.seed = seed;
  rep.pattern = trace.pattern;
  auto& inv = rep.invariants;

  std::vector<const TraceEntry*> queue;
  for (const auto& s : trace.streams) queue.push_back(&s);
  std::stable_sort(queue.begin(), queue.end(),
                   [](const TraceEntry* a, const TraceEntry* b) {
                     return a->arrival_step != b->arrival_step
                                ? a->arrival_step < b->arrival_step
                                : a->stream_id < b->stream_id;
                   });
  std::size_t next_admit = 0;

  std::map<OwnerId, Request> active;
  std::map<OwnerId, RequestRecord> records;
  std::map<OwnerId, RequestRecord> finished;
  std::size_t stalled = 0;
  std::size_t rejection_rounds = 0;
  Step step = 0;

  while (next_admit < queue.size() || !active.empty()) {
    while (next_admit < queue.size() &&
           queue[next_admit]->arrival_step <= step) {
      const TraceEntry& e = *queue[next_admit++];
      Request r = admit(e, table, seed);
      RequestRecord rec;
      rec.id = r.id;
      rec.backend = r.backend;
      rec.prompt_len = e.prompt_len;
      rec.decode_len = e.decode_len;
      rec.chunk = e.chunk;
      rec.admitted_step = step;
      records.emplace(r.id, std::move(rec));
      active.emplace(r.id, std::move(r));
    }

    // View + NextStep for every request without a transition in flight.
    const VersionTable versions = table.versions();
    std::vector<Event> events;
    for (auto& [id, r] : active) {
      if (planner.holds(id)) continue;
      events.push_back(extract_event(r, versions, step));
      if (r.phase == RequestPhase::kAdmitted) {
        r.phase = RequestPhase::kPrefill;
        records.at(id).prefill_ready = step;
      }
    }

    if (injection && !engine_injection_fired &&
        injection->scenario == FailureScenario::kVersionMismatch &&
        step >= injection->at_step) {
      std::vector<Event*> decode;
      for (auto& e : events) {
        if (!is_prefill(key_of(e))) decode.push_back(&e);
      }
      if (decode.size() > injection->slot) {
        Event& target = *decode[injection->slot];
        ++target.expected_version;
        engine_injection_fired = true;
        rep.failures.push_back(FailureRecord{
            injection->scenario, step, to_string(key_of(target)),
            {target.request}, injection->slot,
            "forged expected v" + std::to_string(target.expected_version) +
                " against committed v" +
                std::to_string(versions.at(target.request)),
            "planner rejected the event to revalidation; re-extracted next "
            "iteration"});
      }
    }

    PlanOutput plan = planner.legal_groups(std::move(events), versions, step);
    rep.revalidations += plan.rejected.size();

    std::vector<Group> runnable;
    std::size_t rejected_now = plan.rejected.size();
    for (auto& g : plan.groups) {
      Group checked = g;
      bool forged = false;
      if (injection && !engine_injection_fired && step >= injection->at_step &&
          !is_prefill(g.key) && g.size() > injection->slot) {
        const std::size_t s = injection->slot;
        if (injection->scenario == FailureScenario::kOwnerMapCollision) {
          checked.members.push_back(checked.members[s]);
          checked.owner_map.push_back(checked.owner_map[s]);
          forged = true;
        } else if (injection->scenario == FailureScenario::kStaleReadAttempt &&
                   g.key.rho == Effect::kRead &&
                   checked.members[s].expected_version >= 1) {
          --checked.members[s].expected_version;
          forged = true;
        }
      }
      if (auto violation = validate_group(checked, versions)) {
        ++rep.rejected_groups;
        ++rejected_now;
        if (forged) {
          engine_injection_fired = true;
          rep.failures.push_back(FailureRecord{
              injection->scenario, step, to_string(g.key), checked.owner_map,
              injection->slot,
              std::string(to_string(violation->kind)) + ": " +
                  violation->detail,
              "group rejected before execution; members re-extracted and "
              "re-planned"});
        } else {
          inv.notes.push_back("planner emitted an invalid group at step " +
                              std::to_string(step) + ": " + violation->detail);
          inv.phase_separation = inv.phase_separation &&
                                 violation->kind != ViolationKind::kKeyMismatch;
        }
        continue;
      }
      runnable.push_back(std::move(g));
    }

    std::vector<std::vector<SlotInput>> inputs;
    inputs.reserve(runnable.size());
    for (const auto& g : runnable) {
      auto& slots = inputs.emplace_back();
      for (const auto& m : g.members) {
        const Request& r = active.at(m.request);
        slots.push_back(SlotInput{
            r.x, g.key.rho == Effect::kWrite ? r.tail : TailBuffer{r.tail.capacity, {}}});
      }
    }

    std::map<OwnerId, Snapshot> before;
    if (options_.check_invariants) {
      for (const auto& [id, r] : active) {
        const auto& rec = table.record(id);
        before.emplace(id, Snapshot{rec.version, flatten(rec.payload)});
      }
    }

    const std::vector<GroupResult> results = exec.execute_groups(runnable, inputs);

    double elapsed = cost.t_plan;
    std::size_t executed = 0;
    std::map<OwnerId, bool> wrote;

    auto apply_member = [&](const Event& e, Vec output,
                            std::optional<Version> committed) {
      Request& r = active.at(e.request);
      RequestRecord& rec = records.at(e.request);
      const Step wait = step - e.ready_step;
      ++rep.wait_histogram[wait];
      rep.max_wait = std::max(rep.max_wait, wait);
      if (wait < 0 || wait > planner_config.wait_budget) inv.bounded_wait = false;
      ++executed;

      if (is_prefill(key_of(e))) {
        ++rep.census.prefill;
        rec.prefill_issue = step;
        update_kv_and_tail(r, StepOutcome{true, false}, seed);
        return;
      }
      const Effect expected_effect =
          effect_for_tail(r.tail.length() + 1, r.tail.capacity);
      const Version last_version =
          rec.steps.empty() ? 0 : rec.steps.back().version_after;
      if (e.rho != expected_effect || e.expected_version != last_version ||
          (e.rho == Effect::kWrite) != committed.has_value()) {
        inv.per_request_order = false;
        inv.notes.push_back("order violation for " + to_string(e.request) +
                            " at step " + std::to_string(step));
      }
      (e.rho == Effect::kRead ? rep.census.read : rep.census.write) += 1;
      ++rep.generated_tokens;
      rec.steps.push_back(StepRecord{r.position + 1, e.rho, e.expected_version,
                                     committed.value_or(e.expected_version),
                                     e.ready_step, step});
      rec.outputs.push_back(std::move(output));
      if (committed) {
        wrote[e.request] = true;
        rec.commits.push_back(CommitRecord{
            e.request, *committed, r.position + 1,
            flatten(table.record(e.request).payload)});
      }
      update_kv_and_tail(r, StepOutcome{false, committed.has_value()}, seed);
      if (r.kv_tokens != r.prompt_len + r.position ||
          r.tail.length() != (r.tail_offset + r.position) % r.tail.capacity) {
        rec.tail_cache_consistent = false;
      }
    };

    auto committed_for = [](const GroupResult& res, std::size_t b,
                            const Group& g) -> std::optional<Version> {
      if (g.key.rho != Effect::kWrite) return std::nullopt;
      return res.committed.at(b).second;
    };

    for (std::size_t i = 0; i < runnable.size(); ++i) {
      const Group& g = runnable[i];
      const GroupResult& res = results[i];
      ++rep.groups_issued;
      if (g.members.front().rho != g.key.rho) inv.phase_separation = false;

      std::size_t prompt_tokens = 0;
      if (is_prefill(g.key)) {
        for (const auto& m : g.members) prompt_tokens += active.at(m.request).prompt_len;
        ++rep.prefill_group_sizes[g.size()];
      } else if (g.key.rho == Effect::kRead) {
        ++rep.read_group_sizes[g.size()];
      } else {
        ++rep.write_group_sizes[g.size()];
      }
      elapsed += group_cost(g, cost, prompt_tokens);

      if (res.ok()) {
        for (std::size_t b = 0; b < g.size(); ++b) {
          apply_member(g.members[b], res.outputs[b], committed_for(res, b, g));
        }
        continue;
      }

      // Failed group: nothing may have been published.
      if (options_.check_invariants) {
        for (OwnerId owner : g.owner_map) {
          const auto& rec = table.record(owner);
          const auto& snap = before.at(owner);
          if (rec.version != snap.version ||
              !bit_equal(flatten(rec.payload), snap.payload)) {
            inv.group_atomicity = false;
            inv.notes.push_back("partial commit left by failed group at step " +
                                std::to_string(step) + " on " +
                                to_string(owner));
          }
        }
      }
      const auto& failure = *res.failed;
      if (failure.injected) {
        rep.failures.push_back(FailureRecord{
            injection->scenario, step, to_string(g.key), g.owner_map,
            failure.slot, failure.reason,
            recovery_text(options_.rollback_enabled, g.size())});
      } else {
        inv.notes.push_back("group failed at step " + std::to_string(step) +
                            ": " + failure.reason + "; falling back");
      }

      std::vector<GroupResult> singles;
      try {
        singles = exec.fallback_sequential(g.members, inputs[i], step);
      } catch (const ExecutorError& e) {
        throw EngineError(std::string("fatal executor error: ") + e.what());
      }
      rep.fallback_events += g.size();
      for (std::size_t b = 0; b < g.size(); ++b) {
        const Group single = make_group(g.key, {g.members[b]}, step);
        elapsed += group_cost(single, cost,
                              is_prefill(g.key)
                                  ? active.at(g.members[b].request).prompt_len
                                  : 0);
        apply_member(g.members[b], singles[b].outputs.at(0),
                     committed_for(singles[b], 0, single));
      }
    }

    if (options_.check_invariants) {
      for (const auto& [id, snap] : before) {
        const auto& rec = table.record(id);
        const bool did_write = wrote.contains(id);
        const Version want = snap.version + (did_write ? 1 : 0);
        if (rec.version != want ||
            (!did_write && !bit_equal(flatten(rec.payload), snap.payload))) {
          inv.owner_isolation = false;
          inv.notes.push_back("owner " + to_string(id) +
                              " changed outside its own write at step " +
                              std::to_string(step));
        }
      }
    }

    // Rejected events restart their wait, so a rejection round restarts the
    // stall count. Without an execution no version moves, which means a
    // re-extracted event cannot legitimately be rejected twice in a row.
    if (executed > 0) {
      stalled = 0;
      rejection_rounds = 0;
    } else if (rejected_now > 0) {
      stalled = 0;
      if (++rejection_rounds > 2) {
        throw EngineError("planner livelock: events rejected " +
                          std::to_string(rejection_rounds) +
                          " rounds without progress at step " +
                          std::to_string(step));
      }
    } else if (planner.pending() > 0) {
      if (++stalled > static_cast<std::size_t>(planner_config.wait_budget) + 1) {
        throw EngineError("planner livelock: no progress for " +
                          std::to_string(stalled) + " iterations at step " +
                          std::to_string(step));
      }
    }

    for (auto it = active.begin(); it != active.end();) {
      Request& r = it->second;
      if (r.phase != RequestPhase::kFinished) {
        ++it;
        continue;
      }
      RequestRecord& rec = records.at(r.id);
      const auto& state = table.record(r.id);
      rec.final_version = state.version;
      rec.final_payload = state.payload;
      rec.kv_tokens = r.kv_tokens;
      rec.position = r.position;
      rec.tail_tokens = r.tail.tokens;
      rec.finished_step = step;
      table.release(r.id);
      finished.emplace(r.id, std::move(rec));
      records.erase(r.id);
      it = active.erase(it);
    }

    clock.advance(elapsed);
    ++step;
  }

  if (executor_injection && exec.failure_armed()) {
    inv.notes.push_back("armed failure never fired");
  }
  if (injection && !executor_injection && !engine_injection_fired) {
    inv.notes.push_back("armed failure never fired");
  }

  rep.iterations = static_cast<std::size_t>(step);
  rep.simulated_time = clock.now();
  rep.throughput = rep.generated_tokens == 0
                       ? 0.0
                       : aggregate_throughput(rep.generated_tokens,
                                              rep.simulated_time);
  for (auto& [id, rec] : finished) rep.requests.push_back(std::move(rec));
  return rep;
}

RunReport Engine::run_replicas(const Trace& trace, const CostModel& cost,
                               std::uint64_t seed) {
  validate_trace(trace);
  cost.validate();
  const std::size_t cap = std::min(cost.replica_cap, trace.streams.size());
  std::vector<Trace> parts(std::max<std::size_t>(cap, 1));
  for (std::size_t i = 0; i < trace.streams.size(); ++i) {
    parts[i % parts.size()].streams.push_back(trace.streams[i]);
  }

  const PlannerConfig serial{1, 0, PlanMode::kSerial};
  RunReport merged;
  merged.mode = "replicas";
  merged.planner = serial;
  merged.cost = cost;
  merged.seed = seed;
  merged.pattern = trace.pattern;
  for (auto& part : parts) {
    part.pattern = trace.pattern;
    Engine replica(options_);
    RunReport r = replica.run(part, serial, cost, seed);
    merged.iterations = std::max(merged.iterations, r.iterations);
    merged.simulated_time = std::max(merged.simulated_time, r.simulated_time);
    merged.generated_tokens += r.generated_tokens;
    merged.census.prefill += r.census.prefill;
    merged.census.read += r.census.read;
    merged.census.write += r.census.write;
    for (auto [k, v] : r.prefill_group_sizes) merged.prefill_group_sizes[k] += v;
    for (auto [k, v] : r.read_group_sizes) merged.read_group_sizes[k] += v;
    for (auto [k, v] : r.write_group_sizes) merged.write_group_sizes[k] += v;
    for (auto [k, v] : r.wait_histogram) merged.wait_histogram[k] += v;
    merged.max_wait = std::max(merged.max_wait, r.max_wait);
    merged.groups_issued += r.groups_issued;
    merged.revalidations += r.revalidations;
    merged.rejected_groups += r.rejected_groups;
    merged.fallback_events += r.fallback_events;
    for (auto& q : r.requests) merged.requests.push_back(std::move(q));
    auto& mi = merged.invariants;
    const auto& ri = r.invariants;
    mi.phase_separation = mi.phase_separation && ri.phase_separation;
    mi.bounded_wait = mi.bounded_wait && ri.bounded_wait;
    mi.owner_isolation = mi.owner_isolation && ri.owner_isolation;
    mi.group_atomicity = mi.group_atomicity && ri.group_atomicity;
    mi.per_request_order = mi.per_request_order && ri.per_request_order;
    mi.notes.insert(mi.notes.end(), ri.notes.begin(), ri.notes.end());
  }
  std::sort(merged.requests.begin(), merged.requests.end(),
            [](const RequestRecord& a, const RequestRecord& b) {
              return a.id < b.id;
            });
  merged.throughput = merged.generated_tokens == 0
                          ? 0.0
                          : aggregate_throughput(merged.generated_tokens,
                                                 merged.simulated_time);
  return merged;
}

}  // namespace ttt
