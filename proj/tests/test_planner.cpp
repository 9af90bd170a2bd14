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

#include <gtest/gtest.h>

#include "support/group_legality.h"
#include "ttt/planner.h"
#include "ttt/request.h"

namespace ttt {
namespace {

Event make_event(std::uint64_t id, Effect rho, Version v = 0, Step ready = 0) {
  Event e;
  e.request = OwnerId{id};
  e.rho = rho;
  e.expected_version = v;
  e.ready_step = ready;
  e.placement = "slot0";
  return e;
}

VersionTable zeros(std::uint64_t n) {
  VersionTable t;
  for (std::uint64_t i = 1; i <= n; ++i) t[OwnerId{i}] = 0;
  return t;
}

Request decode_request(std::size_t tail_len, std::size_t chunk) {
  Request r;
  r.id = OwnerId{1};
  r.state_ref = r.id;
  r.phase = RequestPhase::kDecode;
  r.tail.capacity = chunk;
  r.tail.tokens.assign(tail_len, Vec{0.0});
  r.placement = "slot0";
  return r;
}

TEST(ExtractEvent, PartialTailIsRead) {
  EXPECT_EQ(effect_for_tail(57, 128), Effect::kRead);
  EXPECT_EQ(effect_for_tail(128, 128), Effect::kWrite);
  const Event e = extract_event(decode_request(56, 128), zeros(1), 3);
  EXPECT_EQ(e.rho, Effect::kRead);
  EXPECT_EQ(e.ready_step, 3);
}

TEST(ExtractEvent, FillingStepIsWrite) {
  VersionTable v = zeros(1);
  v[OwnerId{1}] = 2;
  const Event e = extract_event(decode_request(127, 128), v, 0);
  EXPECT_EQ(e.rho, Effect::kWrite);
  EXPECT_EQ(e.expected_version, 2u);
}

TEST(ExtractEvent, PrefillUsesItsOwnLayerSet) {
  Request r = decode_request(0, 128);
  r.phase = RequestPhase::kAdmitted;
  const Event e = extract_event(r, zeros(1), 0);
  EXPECT_EQ(e.rho, Effect::kRead);
  EXPECT_TRUE(is_prefill(key_of(e)));
  EXPECT_FALSE(is_prefill(key_of(extract_event(decode_request(0, 128), zeros(1), 0))));
}

TEST(ExtractEvent, FinishedRequestThrows) {
  Request r = decode_request(0, 128);
  r.phase = RequestPhase::kFinished;
  EXPECT_THROW(extract_event(r, zeros(1), 0), PlannerError);
}

TEST(LegalGroups, EightReadsOneGroupImmediately) {
  Planner p({8, 4, PlanMode::kFull});
  std::vector<Event> ev;
  for (std::uint64_t i = 1; i <= 8; ++i) ev.push_back(make_event(i, Effect::kRead));
  const PlanOutput out = p.legal_groups(ev, zeros(8), 0);
  ASSERT_EQ(out.groups.size(), 1u);
  EXPECT_EQ(out.groups[0].size(), 8u);
  EXPECT_EQ(out.groups[0].issue_step, 0);
  EXPECT_EQ(p.pending(), 0u);
}

TEST(LegalGroups, ReadsAndWritesNeverMix) {
  Planner p({8, 0, PlanMode::kFull});
  std::vector<Event> ev;
  for (std::uint64_t i = 1; i <= 6; ++i) ev.push_back(make_event(i, Effect::kRead));
  for (std::uint64_t i = 7; i <= 8; ++i) ev.push_back(make_event(i, Effect::kWrite));
  const PlanOutput out = p.legal_groups(ev, zeros(8), 0);
  ASSERT_EQ(out.groups.size(), 2u);
  std::size_t reads = 0, writes = 0;
  for (const auto& g : out.groups) {
    for (const auto& m : g.members) EXPECT_EQ(m.rho, g.key.rho);
    (g.key.rho == Effect::kRead ? reads : writes) += g.size();
  }
  EXPECT_EQ(reads, 6u);
  EXPECT_EQ(writes, 2u);
}

TEST(LegalGroups, PartialBucketIssuesAtWaitBudget) {
  Planner p({8, 4, PlanMode::kFull});
  std::vector<Event> ev;
  for (std::uint64_t i = 1; i <= 3; ++i) ev.push_back(make_event(i, Effect::kRead, 0, 10));
  EXPECT_TRUE(p.legal_groups(ev, zeros(3), 10).groups.empty());
  for (Step t = 11; t < 14; ++t) {
    EXPECT_TRUE(p.legal_groups({}, zeros(3), t).groups.empty()) << t;
  }
  const PlanOutput out = p.legal_groups({}, zeros(3), 14);
  ASSERT_EQ(out.groups.size(), 1u);
  EXPECT_EQ(out.groups[0].size(), 3u);
  EXPECT_EQ(out.groups[0].issue_step - out.groups[0].members[0].ready_step, 4);
}

TEST(LegalGroups, ZeroWaitIssuesEverythingNow) {
  Planner p({8, 0, PlanMode::kFull});
  const PlanOutput out =
      p.legal_groups({make_event(1, Effect::kRead), make_event(2, Effect::kRead)},
                     zeros(2), 0);
  ASSERT_EQ(out.groups.size(), 1u);
  EXPECT_EQ(out.groups[0].size(), 2u);
}

TEST(LegalGroups, SerialModeEmitsSingletons) {
  Planner p({8, 4, PlanMode::kSerial});
  std::vector<Event> ev;
  for (std::uint64_t i = 1; i <= 5; ++i) ev.push_back(make_event(i, Effect::kRead));
  const PlanOutput out = p.legal_groups(ev, zeros(5), 0);
  ASSERT_EQ(out.groups.size(), 5u);
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    EXPECT_EQ(out.groups[i].size(), 1u);
    EXPECT_EQ(out.groups[i].owner_map[0], OwnerId{i + 1});
  }
}

TEST(LegalGroups, PhaseGroupingBatchesReadsOnly) {
  Planner p({8, 4, PlanMode::kPhaseGrouping});
  std::vector<Event> ev;
  for (std::uint64_t i = 1; i <= 8; ++i) {
    ev.push_back(make_event(i, i <= 4 ? Effect::kWrite : Effect::kRead));
  }
  const PlanOutput first = p.legal_groups(ev, zeros(8), 0);
  ASSERT_EQ(first.groups.size(), 4u);
  for (const auto& g : first.groups) {
    EXPECT_EQ(g.key.rho, Effect::kWrite);
    EXPECT_EQ(g.size(), 1u);
  }
  const PlanOutput later = p.legal_groups({}, zeros(8), 4);
  ASSERT_EQ(later.groups.size(), 1u);
  EXPECT_EQ(later.groups[0].size(), 4u);
}

TEST(LegalGroups, OverfullBucketSplitsOldestFirst) {
  Planner p({4, 2, PlanMode::kFull});
  std::vector<Event> ev;
  for (std::uint64_t i = 10; i >= 1; --i) ev.push_back(make_event(i, Effect::kRead));
  const PlanOutput out = p.legal_groups(ev, zeros(10), 0);
  ASSERT_EQ(out.groups.size(), 2u);
  EXPECT_EQ(out.groups[0].owner_map,
            (std::vector<OwnerId>{{1}, {2}, {3}, {4}}));
  EXPECT_EQ(p.pending(), 2u);
  EXPECT_EQ(p.legal_groups({}, zeros(10), 2).groups.size(), 1u);
}

TEST(LegalGroups, StaleEventsAreRejected) {
  Planner p({8, 4, PlanMode::kFull});
  VersionTable v = zeros(2);
  v[OwnerId{2}] = 3;
  const PlanOutput out = p.legal_groups(
      {make_event(1, Effect::kRead), make_event(2, Effect::kRead, 2)}, v, 0);
  ASSERT_EQ(out.rejected.size(), 1u);
  EXPECT_EQ(out.rejected[0].request, OwnerId{2});
  EXPECT_TRUE(p.holds(OwnerId{1}));
  EXPECT_FALSE(p.holds(OwnerId{2}));

  // A commit while r1 waits in its bucket invalidates it too.
  v[OwnerId{1}] = 1;
  const PlanOutput later = p.legal_groups({}, v, 1);
  ASSERT_EQ(later.rejected.size(), 1u);
  EXPECT_EQ(later.rejected[0].request, OwnerId{1});
  EXPECT_EQ(p.pending(), 0u);
}

TEST(LegalGroups, DuplicateOrFutureEventsThrow) {
  Planner p({8, 4, PlanMode::kFull});
  EXPECT_THROW(p.legal_groups({make_event(1, Effect::kRead), make_event(1, Effect::kRead)},
                              zeros(1), 0),
               PlannerError);
  Planner q({8, 4, PlanMode::kFull});
  EXPECT_THROW(q.legal_groups({make_event(1, Effect::kRead, 0, 5)}, zeros(1), 4),
               PlannerError);
}

TEST(PlannerConfig, RejectsZeroBatch) {
  EXPECT_THROW(Planner({0, 4, PlanMode::kFull}), PlannerError);
  EXPECT_THROW(Planner({8, -1, PlanMode::kFull}), PlannerError);
}

TEST(ValidateGroup, WellFormedPasses) {
  const Group g = make_group(key_of(make_event(1, Effect::kRead)),
                             {make_event(1, Effect::kRead), make_event(2, Effect::kRead)}, 0);
  EXPECT_FALSE(validate_group(g, zeros(2)).has_value());
}

TEST(ValidateGroup, DuplicateOwnerIsOwnerMapViolation) {
  const Group g = make_group(key_of(make_event(1, Effect::kRead)),
                             {make_event(1, Effect::kRead), make_event(1, Effect::kRead)}, 0);
  const auto v = validate_group(g, zeros(1));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, ViolationKind::kOwnerMapCollision);
  EXPECT_EQ(v->slot, 1u);
}

TEST(ValidateGroup, CommitBehindTheEventIsVersionViolation) {
  const Group g = make_group(key_of(make_event(1, Effect::kWrite)),
                             {make_event(1, Effect::kWrite, 2)}, 0);
  VersionTable v = zeros(1);
  v[OwnerId{1}] = 2;
  EXPECT_FALSE(validate_group(g, v).has_value());
  v[OwnerId{1}] = 3;
  const auto bad = validate_group(g, v);
  ASSERT_TRUE(bad.has_value());
  EXPECT_EQ(bad->kind, ViolationKind::kVersionMismatch);
}

TEST(ValidateGroup, MembersMayBeAtDifferentVersions) {
  const Group g = make_group(
      key_of(make_event(1, Effect::kRead)),
      {make_event(1, Effect::kRead, 1), make_event(2, Effect::kRead, 3)}, 0);
  VersionTable v;
  v[OwnerId{1}] = 1;
  v[OwnerId{2}] = 3;
  EXPECT_FALSE(validate_group(g, v).has_value());
}

TEST(ValidateGroup, MixedEffectsAreKeyMismatch) {
  Group g = make_group(key_of(make_event(1, Effect::kRead)),
                       {make_event(1, Effect::kRead), make_event(2, Effect::kWrite)}, 0);
  const auto v = validate_group(g, zeros(2));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, ViolationKind::kKeyMismatch);
}

TEST(ValidateGroup, UnknownOwnerAndMapMismatch) {
  Group g = make_group(key_of(make_event(1, Effect::kRead)),
                       {make_event(5, Effect::kRead)}, 0);
  EXPECT_EQ(validate_group(g, zeros(1))->kind, ViolationKind::kUnknownOwner);
  g.owner_map.push_back(OwnerId{1});
  EXPECT_EQ(validate_group(g, zeros(5))->kind, ViolationKind::kOwnerMapMismatch);
}

TEST(MakeGroup, EmptyIsNotConstructible) {
  EXPECT_THROW(make_group(CompatKey{}, {}, 0), PlannerError);
}

TEST(CompatKeyOrder, DistinguishesEveryComponent) {
  const Event base = make_event(1, Effect::kRead);
  Event other = base;
  other.tau = BackendType::kDeltaAdapter;
  EXPECT_NE(key_of(base), key_of(other));
  other = base;
  other.sigma.hidden = 16;
  EXPECT_NE(key_of(base), key_of(other));
  other = base;
  other.placement = "slot1";
  EXPECT_NE(key_of(base), key_of(other));
  other = base;
  other.rho = Effect::kWrite;
  EXPECT_NE(key_of(base), key_of(other));
}

TEST(GroupLegalityProperty, TwoHundredRandomSchedules) {
  std::size_t groups = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = testing::check_random_event_set(seed);
    ASSERT_TRUE(r.ok) << r.failure;
    groups += r.groups;
  }
  EXPECT_GT(groups, 0u);
}

}  // namespace
}  // namespace ttt
