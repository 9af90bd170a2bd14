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

#include <array>
#include <optional>
#include <string>

#include "ttt/engine.h"
#include "ttt/harness/oracle.h"

namespace ttt::harness {

enum class Clause {
  kRequestOutputMapping,
  kReadStepImmutability,
  kWriteOrderAndCount,
  kVersionProgression,
  kOwnerLocalCommit,
  kTailCacheConsistency,
};

inline constexpr std::size_t kClauseCount = 6;

std::string_view to_string(Clause clause);

struct ClauseVerdict {
  Clause clause = Clause::kRequestOutputMapping;
  bool passed = true;
  // First divergence, when the clause fails.
  std::optional<OwnerId> owner;
  std::optional<std::size_t> step;
  std::string detail;
};

struct ContractVerdicts {
  ContractVerdicts() {
    for (std::size_t i = 0; i < kClauseCount; ++i) {
      clauses[i].clause = static_cast<Clause>(i);
    }
  }

  std::array<ClauseVerdict, kClauseCount> clauses;

  bool all_passed() const;
  std::size_t passed_count() const;
  const ClauseVerdict& at(Clause c) const {
    return clauses[static_cast<std::size_t>(c)];
  }
};

ContractVerdicts compare_contract(const RunReport& report,
                                  const OracleRecord& oracle);

}  // namespace ttt::harness
