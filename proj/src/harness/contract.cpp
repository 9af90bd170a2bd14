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

#include "ttt/harness/contract.h"

#include <algorithm>
#include <map>

namespace ttt::harness {

std::string_view to_string(Clause clause) {
  switch (clause) {
    case Clause::kRequestOutputMapping:
      return "request-output-mapping";
    case Clause::kReadStepImmutability:
      return "read-step-immutability";
    case Clause::kWriteOrderAndCount:
      return "write-order-and-count";
    case Clause::kVersionProgression:
      return "version-progression";
    case Clause::kOwnerLocalCommit:
      return "owner-local-commit";
    case Clause::kTailCacheConsistency:
      return "tail-cache-consistency";
  }
  return "?";
}

bool ContractVerdicts::all_passed() const {
  return passed_count() == kClauseCount;
}

std::size_t ContractVerdicts::passed_count() const {
  return static_cast<std::size_t>(std::count_if(
      clauses.begin(), clauses.end(),
      [](const ClauseVerdict& v) { return v.passed; }));
}

namespace {

class Checker {
 public:
  explicit Checker(ContractVerdicts& out) : out_(out) {}

  // Records only the first divergence per clause.
  void fail(Clause c, OwnerId owner, std::optional<std::size_t> step,
            std::string detail) {
    auto& v = out_.clauses[static_cast<std::size_t>(c)];
    if (!v.passed) return;
    v.passed = false;
    v.owner = owner;
    v.step = step;
    v.detail = std::move(detail);
  }

 private:
  ContractVerdicts& out_;
};

std::vector<std::size_t> write_steps(const std::vector<StepRecord>& steps) {
  std::vector<std::size_t> out;
  for (const auto& s : steps) {
    if (s.rho == Effect::kWrite) out.push_back(s.step);
  }
  return out;
}

void compare_request(const RequestRecord& got, const OracleRequest& want,
                     Checker& check) {
  const OwnerId id = want.id;

  // Request-output mapping.
  if (got.outputs.size() != want.outputs.size()) {
    check.fail(Clause::kRequestOutputMapping, id, std::nullopt,
               "output count " + std::to_string(got.outputs.size()) +
                   " vs oracle " + std::to_string(want.outputs.size()));
  } else {
    for (std::size_t i = 0; i < got.outputs.size(); ++i) {
      if (!bit_equal(got.outputs[i], want.outputs[i])) {
        check.fail(Clause::kRequestOutputMapping, id, i + 1,
                   "output differs from oracle");
        break;
      }
    }
  }

  // Read-step immutability: a read never moves the version and observes the
  // same committed version as the oracle.
  const std::size_t n = std::min(got.steps.size(), want.steps.size());
  for (std::size_t i = 0; i < got.steps.size(); ++i) {
    const auto& s = got.steps[i];
    if (s.rho != Effect::kRead) continue;
    if (s.version_before != s.version_after) {
      check.fail(Clause::kReadStepImmutability, id, s.step,
                 "read moved version");
      break;
    }
    if (i < n && want.steps[i].version_before != s.version_before) {
      check.fail(Clause::kReadStepImmutability, id, s.step,
                 "read observed v" + std::to_string(s.version_before) +
                     ", oracle v" + std::to_string(want.steps[i].version_before));
      break;
    }
  }

  // Write order and count.
  const auto gw = write_steps(got.steps);
  const auto ww = write_steps(want.steps);
  if (gw != ww) {
    std::size_t k = 0;
    while (k < gw.size() && k < ww.size() && gw[k] == ww[k]) ++k;
    check.fail(Clause::kWriteOrderAndCount, id,
               k < ww.size() ? std::optional<std::size_t>(ww[k]) : std::nullopt,
               std::to_string(gw.size()) + " writes vs oracle " +
                   std::to_string(ww.size()));
  }

  // Version progression.
  if (got.steps.size() != want.steps.size()) {
    check.fail(Clause::kVersionProgression, id, std::nullopt,
               "step count differs from oracle");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (got.steps[i].version_after != want.steps[i].version_after ||
          got.steps[i].version_before != want.steps[i].version_before) {
        check.fail(Clause::kVersionProgression, id, got.steps[i].step,
                   "v" + std::to_string(got.steps[i].version_after) +
                       " vs oracle v" +
                       std::to_string(want.steps[i].version_after));
        break;
      }
    }
  }
  if (got.final_version != want.final_version) {
    check.fail(Clause::kVersionProgression, id, std::nullopt,
               "final v" + std::to_string(got.final_version) + " vs oracle v" +
                   std::to_string(want.final_version));
  }

  // Owner-local commit: every published payload and the final one match.
  if (got.commits.size() != want.commits.size()) {
    check.fail(Clause::kOwnerLocalCommit, id, std::nullopt,
               "commit count differs from oracle");
  } else {
    for (std::size_t i = 0; i < got.commits.size(); ++i) {
      const auto& a = got.commits[i];
      const auto& b = want.commits[i];
      if (a.owner != id || a.version != b.version || a.step != b.step ||
          !bit_equal(a.payload, b.payload)) {
        check.fail(Clause::kOwnerLocalCommit, id, b.step,
                   "commit v" + std::to_string(b.version) + " differs");
        break;
      }
    }
  }
  if (!bit_equal(got.final_payload, want.final_payload)) {
    const Vec a = flatten(got.final_payload);
    const Vec b = flatten(want.final_payload);
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && bit_equal(Vec{a[k]}, Vec{b[k]})) ++k;
    check.fail(Clause::kOwnerLocalCommit, id, std::nullopt,
               "final payload differs at element " + std::to_string(k));
  }

  // Tail/cache consistency.
  if (!got.tail_cache_consistent) {
    check.fail(Clause::kTailCacheConsistency, id, std::nullopt,
               "kv/tail drifted during the run");
  }
  if (got.kv_tokens != want.kv_tokens || got.position != want.position) {
    check.fail(Clause::kTailCacheConsistency, id, std::nullopt,
               "kv " + std::to_string(got.kv_tokens) + " vs oracle " +
                   std::to_string(want.kv_tokens));
  }
  bool tails_equal = got.tail_tokens.size() == want.tail_tokens.size();
  for (std::size_t i = 0; tails_equal && i < got.tail_tokens.size(); ++i) {
    tails_equal = bit_equal(got.tail_tokens[i], want.tail_tokens[i]);
  }
  if (!tails_equal) {
    check.fail(Clause::kTailCacheConsistency, id, std::nullopt,
               "tail contents differ from oracle");
  }
}

}  // namespace

ContractVerdicts compare_contract(const RunReport& report,
                                  const OracleRecord& oracle) {
  ContractVerdicts out;
  Checker check(out);

  std::map<OwnerId, const RequestRecord*> got;
  for (const auto& r : report.requests) got.emplace(r.id, &r);

  for (const auto& want : oracle.requests) {
    auto it = got.find(want.id);
    if (it == got.end()) {
      for (std::size_t c = 0; c < kClauseCount; ++c) {
        check.fail(static_cast<Clause>(c), want.id, std::nullopt,
                   "request missing from run");
      }
      continue;
    }
    compare_request(*it->second, want, check);
    got.erase(it);
  }
  for (const auto& [id, rec] : got) {
    check.fail(Clause::kRequestOutputMapping, id, std::nullopt,
               "request not in oracle");
  }
  return out;
}

}  // namespace ttt::harness
