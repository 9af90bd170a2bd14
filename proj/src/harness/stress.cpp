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

#include "ttt/harness/stress.h"

#include "ttt/harness/trace_gen.h"

namespace ttt::harness {

FailureSpec default_spec(FailureScenario scenario) {
  switch (scenario) {
    case FailureScenario::kMidGroupWriteFail:
      return {scenario, 0, 3};  // first boundary group, fourth slot
    case FailureScenario::kVersionMismatch:
      return {scenario, 50, 2};
    case FailureScenario::kOwnerMapCollision:
      return {scenario, 60, 0};
    case FailureScenario::kStaleReadAttempt:
      return {scenario, 200, 1};  // owners are past v0 by then
    case FailureScenario::kRollbackRetry:
      return {scenario, 300, 0};  // third boundary group
  }
  return {scenario, 0, 0};
}

ScenarioVerdict run_scenario(const Trace& trace, const FailureSpec& spec,
                             const StressOptions& options) {
  RunOptions run;
  run.mode = RunMode::kFull;
  run.planner = options.planner;
  run.seed = options.seed;
  run.engine = options.engine;
  run.inject = spec;
  ScenarioVerdict v;
  v.scenario = spec.scenario;
  v.spec = spec;

  VerifyResult result;
  try {
    result = verify_trace(trace, run);
  } catch (const EngineError& e) {
    // Unrecoverable run: the scenario failed to restore a valid state.
    v.detail = e.what();
    v.recovery = "none (run aborted)";
    for (auto& c : v.contract.clauses) c.passed = false;
    v.invariants.notes.push_back(e.what());
    v.invariants.group_atomicity = false;
    return v;
  }
  v.contract = result.contract;
  v.invariants = result.report.invariants;
  const auto& failures = result.report.failures;
  v.fired = failures.size() == 1 && failures.front().scenario == spec.scenario;
  if (!failures.empty()) {
    const auto& f = failures.front();
    v.injected_group = "step " + std::to_string(f.step) + " " + f.group_key +
                       " members=" + std::to_string(f.members.size()) +
                       " slot=" + std::to_string(f.slot);
    v.recovery = f.recovery;
    v.detail = f.detail;
  } else {
    v.detail = "injection never fired";
  }
  v.passed = v.fired && v.contract.all_passed() && v.invariants.all();
  return v;
}

std::vector<ScenarioVerdict> stress_suite(const StressOptions& options) {
  TraceSpec spec = preset("uniform");
  spec.backends = {options.backend};
  spec.seed = options.seed;
  const Trace trace = generate_trace(spec);

  std::vector<ScenarioVerdict> out;
  for (auto s : {FailureScenario::kMidGroupWriteFail,
                 FailureScenario::kVersionMismatch,
                 FailureScenario::kOwnerMapCollision,
                 FailureScenario::kStaleReadAttempt,
                 FailureScenario::kRollbackRetry}) {
    out.push_back(run_scenario(trace, default_spec(s), options));
  }
  return out;
}

}  // namespace ttt::harness
