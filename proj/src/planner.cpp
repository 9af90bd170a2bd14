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

#include "ttt/planner.h"

#include <algorithm>

namespace ttt {

std::string_view to_string(RequestPhase phase) {
  switch (phase) {
    case RequestPhase::kAdmitted:
      return "admitted";
    case RequestPhase::kPrefill:
      return "prefill";
    case RequestPhase::kDecode:
      return "decode";
    case RequestPhase::kFinished:
      return "finished";
  }
  return "?";
}

std::string_view to_string(PlanMode mode) {
  switch (mode) {
    case PlanMode::kSerial:
      return "serial";
    case PlanMode::kPhaseGrouping:
      return "phase-grouping";
    case PlanMode::kFull:
      return "full";
  }
  return "?";
}

PlanMode parse_plan_mode(std::string_view text) {
  if (text == "serial") return PlanMode::kSerial;
  if (text == "phase-grouping" || text == "phase") return PlanMode::kPhaseGrouping;
  if (text == "full") return PlanMode::kFull;
  throw PlannerError("unknown planner mode: " + std::string(text));
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kEmptyGroup:
      return "empty-group";
    case ViolationKind::kKeyMismatch:
      return "key-mismatch";
    case ViolationKind::kVersionMismatch:
      return "version-mismatch";
    case ViolationKind::kOwnerMapCollision:
      return "owner-map-collision";
    case ViolationKind::kOwnerMapMismatch:
      return "owner-map-mismatch";
    case ViolationKind::kUnknownOwner:
      return "unknown-owner";
  }
  return "?";
}

CompatKey key_of(const Event& event) {
  return CompatKey{event.rho, event.tau, event.sigma, event.placement};
}

std::string to_string(const CompatKey& key) {
  return std::string(to_string(key.rho)) + ":" +
         std::string(to_string(key.tau)) + ":" + to_string(key.sigma) + "@" +
         key.placement;
}

bool is_prefill(const CompatKey& key) {
  return key.sigma.layer_set == kPrefillLayers;
}

Effect effect_for_tail(std::size_t occupancy, std::size_t chunk) {
  return occupancy == chunk ? Effect::kWrite : Effect::kRead;
}

Event extract_event(const Request& request, const VersionTable& versions,
                    Step clock) {
  if (request.phase == RequestPhase::kFinished) {
    throw PlannerError("no pending step: " + to_string(request.id) +
                       " is finished");
  }
  auto it = versions.find(request.state_ref);
  if (it == versions.end()) {
    throw PlannerError("no committed version for " +
                       to_string(request.state_ref));
  }
  Event e;
  e.request = request.id;
  e.tau = request.backend;
  e.sigma = request.shape;
  e.placement = request.placement;
  e.expected_version = it->second;
  e.ready_step = clock;
  if (request.phase == RequestPhase::kAdmitted ||
      request.phase == RequestPhase::kPrefill) {
    e.rho = Effect::kRead;
    e.sigma.layer_set = std::string(kPrefillLayers);
  } else {
    e.rho = effect_for_tail(request.tail.length() + 1, request.tail.capacity);
  }
  return e;
}

Group make_group(CompatKey key, std::vector<Event> members, Step issue_step) {
  if (members.empty()) throw PlannerError("a group needs at least one member");
  Group g;
  g.key = std::move(key);
  g.owner_map.reserve(members.size());
  for (const auto& m : members) g.owner_map.push_back(m.request);
  g.members = std::move(members);
  g.issue_step = issue_step;
  return g;
}

std::optional<Violation> validate_group(const Group& group,
                                        const VersionTable& versions) {
  if (group.members.empty()) {
    return Violation{ViolationKind::kEmptyGroup, 0, {}, "group has no members"};
  }
  if (group.owner_map.size() != group.members.size()) {
    return Violation{ViolationKind::kOwnerMapMismatch, 0, {},
                     "owner map size differs from member count"};
  }
  std::set<OwnerId> seen;
  for (std::size_t b = 0; b < group.members.size(); ++b) {
    const Event& m = group.members[b];
    if (key_of(m) != group.key) {
      return Violation{ViolationKind::kKeyMismatch, b, m.request,
                       to_string(key_of(m)) + " != " + to_string(group.key)};
    }
    if (group.owner_map[b] != m.request) {
      return Violation{ViolationKind::kOwnerMapMismatch, b, m.request,
                       "slot bound to " + to_string(group.owner_map[b])};
    }
    if (!seen.insert(m.request).second) {
      return Violation{ViolationKind::kOwnerMapCollision, b, m.request,
                       "owner appears twice"};
    }
    auto it = versions.find(m.request);
    if (it == versions.end()) {
      return Violation{ViolationKind::kUnknownOwner, b, m.request,
                       "owner not in version table"};
    }
    if (it->second != m.expected_version) {
      return Violation{ViolationKind::kVersionMismatch, b, m.request,
                       "expected v" + std::to_string(m.expected_version) +
                           ", committed v" + std::to_string(it->second)};
    }
  }
  return std::nullopt;
}

Planner::Planner(PlannerConfig config) : config_(config) {
  if (config_.target_batch == 0) throw PlannerError("target batch must be >= 1");
  if (config_.wait_budget < 0) throw PlannerError("wait budget must be >= 0");
}

bool Planner::batches(Effect effect) const {
  switch (config_.mode) {
    case PlanMode::kSerial:
      return false;
    case PlanMode::kPhaseGrouping:
      return effect == Effect::kRead;
    case PlanMode::kFull:
      return true;
  }
  return false;
}

std::size_t Planner::pending() const { return pending_owners_.size(); }

std::vector<Event> Planner::pending_events() const {
  std::vector<Event> out;
  for (const auto& [key, bucket] : buckets_) {
    out.insert(out.end(), bucket.begin(), bucket.end());
  }
  return out;
}

PlanOutput Planner::legal_groups(std::vector<Event> events,
                                 const VersionTable& versions, Step clock) {
  PlanOutput out;
  auto version_ok = [&](const Event& e) {
    auto it = versions.find(e.request);
    return it != versions.end() && it->second == e.expected_version;
  };

  for (auto& e : events) {
    if (!pending_owners_.insert(e.request).second) {
      throw PlannerError("request " + to_string(e.request) +
                         " exposed two transitions at once");
    }
    if (e.ready_step > clock) {
      throw PlannerError("event from the future for " + to_string(e.request));
    }
    if (!version_ok(e)) {
      pending_owners_.erase(e.request);
      out.rejected.push_back(std::move(e));
      continue;
    }
    buckets_[key_of(e)].push_back(std::move(e));
  }

  auto oldest_first = [](const Event& a, const Event& b) {
    return a.ready_step != b.ready_step ? a.ready_step < b.ready_step
                                        : a.request < b.request;
  };

  for (auto it = buckets_.begin(); it != buckets_.end();) {
    const CompatKey& key = it->first;
    auto& bucket = it->second;

    // Members may have gone stale while waiting.
    auto stale = std::stable_partition(bucket.begin(), bucket.end(), version_ok);
    for (auto s = stale; s != bucket.end(); ++s) {
      pending_owners_.erase(s->request);
      out.rejected.push_back(std::move(*s));
    }
    bucket.erase(stale, bucket.end());
    std::sort(bucket.begin(), bucket.end(), oldest_first);

    const std::size_t cap = batches(key.rho) ? config_.target_batch : 1;
    const bool expired =
        !bucket.empty() &&
        (cap == 1 || clock - bucket.front().ready_step >= config_.wait_budget);

    std::size_t taken = 0;
    while (bucket.size() - taken >= cap ||
           (expired && taken < bucket.size())) {
      const std::size_t n = std::min(cap, bucket.size() - taken);
      std::vector<Event> members(bucket.begin() + taken,
                                 bucket.begin() + taken + n);
      for (const auto& m : members) pending_owners_.erase(m.request);
      out.groups.push_back(make_group(key, std::move(members), clock));
      taken += n;
    }
    bucket.erase(bucket.begin(), bucket.begin() + taken);

    if (bucket.empty()) {
      it = buckets_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

}  // namespace ttt
