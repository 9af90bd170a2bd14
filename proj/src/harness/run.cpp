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

#include "ttt/harness/run.h"

#include <stdexcept>

namespace ttt::harness {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kSerial:
      return "serial";
    case RunMode::kReplicas:
      return "replicas";
    case RunMode::kPhaseGrouping:
      return "phase-grouping";
    case RunMode::kFull:
      return "full";
  }
  return "?";
}

RunMode parse_run_mode(std::string_view text) {
  if (text == "serial") return RunMode::kSerial;
  if (text == "replicas") return RunMode::kReplicas;
  if (text == "phase-grouping" || text == "phase") return RunMode::kPhaseGrouping;
  if (text == "full") return RunMode::kFull;
  throw std::invalid_argument("unknown mode: " + std::string(text));
}

RunReport run_trace(const Trace& trace, const RunOptions& options) {
  Engine engine(options.engine);
  if (options.inject) engine.inject_failure(*options.inject);
  if (options.mode == RunMode::kReplicas) {
    return engine.run_replicas(trace, options.cost, options.seed);
  }
  PlannerConfig planner = options.planner;
  switch (options.mode) {
    case RunMode::kSerial:
      planner.mode = PlanMode::kSerial;
      break;
    case RunMode::kPhaseGrouping:
      planner.mode = PlanMode::kPhaseGrouping;
      break;
    default:
      planner.mode = PlanMode::kFull;
      break;
  }
  return engine.run(trace, planner, options.cost, options.seed);
}

VerifyResult verify_trace(const Trace& trace, const RunOptions& options) {
  VerifyResult out;
  out.report = run_trace(trace, options);
  out.oracle = sequential_oracle(trace, options.seed);
  out.contract = compare_contract(out.report, out.oracle);
  return out;
}

bool Ladder::monotone() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i - 1].throughput < rows[i].throughput)) return false;
  }
  return true;
}

Ladder run_ladder(const Trace& trace, const RunOptions& base) {
  Ladder ladder;
  const OracleRecord oracle = sequential_oracle(trace, base.seed);
  for (RunMode mode : {RunMode::kSerial, RunMode::kReplicas,
                       RunMode::kPhaseGrouping, RunMode::kFull}) {
    RunOptions opts = base;
    opts.mode = mode;
    opts.inject.reset();
    const RunReport report = run_trace(trace, opts);
    LadderRow row;
    row.mode = mode;
    row.throughput = report.throughput;
    row.simulated_time = report.simulated_time;
    row.contract_passed = compare_contract(report, oracle).all_passed() &&
                          report.invariants.all();
    ladder.rows.push_back(row);
  }
  const double serial = ladder.rows[0].throughput;
  const double replicas = ladder.rows[1].throughput;
  for (auto& row : ladder.rows) {
    row.speedup_vs_serial = serial > 0.0 ? row.throughput / serial : 0.0;
    row.speedup_vs_replicas = replicas > 0.0 ? row.throughput / replicas : 0.0;
  }
  return ladder;
}

}  // namespace ttt::harness
