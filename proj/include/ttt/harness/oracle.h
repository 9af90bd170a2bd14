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
#include <utility>
#include <vector>

#include "ttt/engine.h"
#include "ttt/trace.h"

namespace ttt::harness {

struct OracleRequest {
  OwnerId id;
  std::vector<Vec> outputs;
  std::vector<StepRecord> steps;
  std::vector<CommitRecord> commits;
  Version final_version = 0;
  BackendPayload final_payload;
  std::size_t kv_tokens = 0;
  std::size_t position = 0;
  std::vector<Vec> tail_tokens;
};

struct OracleRecord {
  std::vector<OracleRequest> requests;  // sorted by id
  // Every commit, in execution order.
  std::vector<std::pair<OwnerId, Version>> write_log;
};

// Runs each request to completion on its own, one decode step at a time,
// using only the backend functions. Shares no code with the planner,
// executor, state table or engine.
OracleRecord sequential_oracle(const Trace& trace, std::uint64_t seed);

}  // namespace ttt::harness
