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
#include <optional>
#include <string>
#include <vector>

#include "ttt/engine.h"
#include "ttt/harness/contract.h"
#include "ttt/harness/oracle.h"

namespace ttt::harness {

// Ladder rows: the three planner modes plus independent serial replicas.
enum class RunMode { kSerial, kReplicas, kPhaseGrouping, kFull };

std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);

struct RunOptions {
  RunMode mode = RunMode::kFull;
  PlannerConfig planner;  // mode field is overridden by `mode`
  CostModel cost;
  std::uint64_t seed = 0;
  EngineOptions engine;
  std::optional<FailureSpec> inject;
};

RunReport run_trace(const Trace& trace, const RunOptions& options);

struct VerifyResult {
  RunReport report;
  OracleRecord oracle;
  ContractVerdicts contract;

  bool passed() const { return contract.all_passed() && report.invariants.all(); }
};

VerifyResult verify_trace(const Trace& trace, const RunOptions& options);

struct LadderRow {
  RunMode mode;
  double throughput = 0.0;
  double simulated_time = 0.0;
  double speedup_vs_serial = 0.0;
  double speedup_vs_replicas = 0.0;
  bool contract_passed = false;
};

struct Ladder {
  std::vector<LadderRow> rows;  // serial, replicas, phase-grouping, full
  bool monotone() const;
};

Ladder run_ladder(const Trace& trace, const RunOptions& base);

}  // namespace ttt::harness
