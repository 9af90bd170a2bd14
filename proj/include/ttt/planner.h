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
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttt/backends.h"
#include "ttt/request.h"
#include "ttt/state_table.h"
#include "ttt/types.h"

namespace ttt {

// The next transition a request exposes to the planner.
struct Event {
  OwnerId request;
  BackendType tau = BackendType::kFastWeight;
  OperatorShapeClass sigma;
  Effect rho = Effect::kRead;
  Version expected_version = 0;
  Step ready_step = 0;
  std::string placement;
};

struct CompatKey {
  Effect rho = Effect::kRead;
  BackendType tau = BackendType::kFastWeight;
  OperatorShapeClass sigma;
  std::string placement;

  friend auto operator<=>(const CompatKey&, const CompatKey&) = default;
};

CompatKey key_of(const Event& event);
std::string to_string(const CompatKey& key);
bool is_prefill(const CompatKey& key);

struct Group {
  CompatKey key;
  std::vector<Event> members;
  // owner_map[b] is the owner bound to batch slot b.
  std::vector<OwnerId> owner_map;
  Step issue_step = 0;

  std::size_t size() const { return members.size(); }
};

// Effect of a decode step given the tail occupancy once the step's own token
// is counted: Write exactly when that token fills the chunk.
Effect effect_for_tail(std::size_t occupancy, std::size_t chunk);

// Next transition of an active request. Prefill is a single Read event on a
// dedicated "prefill" layer set so it never co-batches with decode steps.
// Throws PlannerError for a finished request.
Event extract_event(const Request& request, const VersionTable& versions,
                    Step clock);

// Throws PlannerError for an empty member list.
Group make_group(CompatKey key, std::vector<Event> members, Step issue_step);

enum class PlanMode { kSerial, kPhaseGrouping, kFull };

std::string_view to_string(PlanMode mode);
PlanMode parse_plan_mode(std::string_view text);

struct PlannerConfig {
  std::size_t target_batch = 8;
  Step wait_budget = 4;
  PlanMode mode = PlanMode::kFull;
};

enum class ViolationKind {
  kEmptyGroup,
  kKeyMismatch,
  kVersionMismatch,
  kOwnerMapCollision,
  kOwnerMapMismatch,
  kUnknownOwner,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t slot = 0;
  OwnerId owner;
  std::string detail;
};

// Key homogeneity, per-member version match and owner-map injectivity.
// Returns the first violation found.
std::optional<Violation> validate_group(const Group& group,
                                        const VersionTable& versions);

class PlannerError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PlanOutput {
  std::vector<Group> groups;
  // Events whose expected version no longer matches; the caller re-extracts
  // them on the next iteration.
  std::vector<Event> rejected;
};

// Buckets ready events by compatibility key and issues groups when a bucket
// reaches the target batch size or its oldest member has waited the full
// budget. Waiting is measured in planner steps, never in simulated time.
class Planner {
 public:
  explicit Planner(PlannerConfig config);

  const PlannerConfig& config() const { return config_; }

  PlanOutput legal_groups(std::vector<Event> events,
                          const VersionTable& versions, Step clock);

  std::size_t pending() const;
  std::vector<Event> pending_events() const;
  bool holds(OwnerId owner) const { return pending_owners_.contains(owner); }

 private:
  bool batches(Effect effect) const;

  PlannerConfig config_;
  std::map<CompatKey, std::vector<Event>> buckets_;
  std::set<OwnerId> pending_owners_;
};

}  // namespace ttt
