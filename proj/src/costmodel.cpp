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

#include "ttt/costmodel.h"

#include <cmath>
#include <string>

namespace ttt {

void CostModel::validate() const {
  const double fields[] = {t_launch,  t_read_member,  t_write_member,
                           t_commit,  t_prefill_unit, t_plan};
  for (double f : fields) {
    if (!std::isfinite(f) || f < 0.0) {
      throw std::invalid_argument("cost model fields must be finite and >= 0");
    }
  }
  if (t_launch <= 0.0) throw std::invalid_argument("t_launch must be > 0");
  if (replica_cap == 0) throw std::invalid_argument("replica_cap must be >= 1");
}

void Clock::advance(double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("clock cannot run backwards");
  now_ += dt;
}

double group_cost(const Group& group, const CostModel& model,
                  std::size_t prompt_tokens) {
  const auto n = static_cast<double>(group.size());
  if (is_prefill(group.key)) {
    return model.t_launch +
           static_cast<double>(prompt_tokens) * model.t_prefill_unit;
  }
  if (group.key.rho == Effect::kRead) {
    return model.t_launch + n * model.t_read_member;
  }
  return model.t_launch + n * (model.t_write_member + model.t_commit);
}

double aggregate_throughput(std::size_t generated_tokens, double total_time) {
  if (total_time <= 0.0) {
    throw std::domain_error("throughput undefined for an empty run");
  }
  return static_cast<double>(generated_tokens) / total_time;
}

}  // namespace ttt
