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

#include <cstdint>
#include <string>
#include <vector>

#include "ttt/executor.h"
#include "ttt/harness/run.h"

namespace ttt::harness {

struct ScenarioVerdict {
  FailureScenario scenario;
  FailureSpec spec;
  bool fired = false;
  bool passed = false;
  ContractVerdicts contract;
  InvariantVerdicts invariants;
  std::string injected_group;
  std::string recovery;
  std::string detail;
};

struct StressOptions {
  BackendType backend = BackendType::kFastWeight;
  std::uint64_t seed = 0;
  PlannerConfig planner{8, 4, PlanMode::kFull};
  EngineOptions engine;  // engine.rollback_enabled = false is the negative control
};

// Where each scenario strikes on the uniform trace.
FailureSpec default_spec(FailureScenario scenario);

ScenarioVerdict run_scenario(const Trace& trace, const FailureSpec& spec,
                             const StressOptions& options);

// All five injected failures on the uniform trace, in a fixed order.
std::vector<ScenarioVerdict> stress_suite(const StressOptions& options = {});

}  // namespace ttt::harness
