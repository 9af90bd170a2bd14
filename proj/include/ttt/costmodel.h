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
#include <stdexcept>

#include "ttt/planner.h"

namespace ttt {

// Simulated time units. Only timing fields of a run depend on these values;
// the planner counts waits in steps so costs never alter scheduling.
struct CostModel {
  double t_launch = 1.0;
  double t_read_member = 0.1;
  double t_write_member = 0.2;
  double t_commit = 0.05;
  double t_prefill_unit = 0.002;
  double t_plan = 0.01;
  std::size_t replica_cap = 3;

  void validate() const;
};

class Clock {
 public:
  double now() const { return now_; }
  void advance(double dt);

 private:
  double now_ = 0.0;
};

// Read: launch + n * read. Write: launch + n * (write + commit).
// Prefill: launch + sum(prompt_len) * prefill_unit.
double group_cost(const Group& group, const CostModel& model,
                  std::size_t prompt_tokens = 0);

// Generated tokens per simulated time unit.
double aggregate_throughput(std::size_t generated_tokens, double total_time);

}  // namespace ttt
