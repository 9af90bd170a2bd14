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

#include <set>

#include "ttt/backends.h"

namespace ttt {
namespace {

FastWeightPayload identity2() { return FastWeightPayload{2, {1, 0, 0, 1}}; }

TEST(ApplyRead, ZeroFastWeightIsIdentity) {
  const Vec x = gen_token(OwnerId{3}, 17, 0, 8);
  EXPECT_TRUE(bit_equal(apply_read(zero_fast_weight(8), x), x));
}

TEST(ApplyRead, IdentityFastWeightDoubles) {
  const Vec y = apply_read(identity2(), Vec{1, 2});
  EXPECT_EQ(y, (Vec{2, 4}));
}

TEST(ApplyRead, ZeroAdapterAIsIdentityForAnyB) {
  DeltaAdapterPayload p{2, 3, Vec(6, 0.0), {1, -2, 3, 0.5, 7, -9}};
  const Vec x{0.25, -1.5, 3.0};
  EXPECT_TRUE(bit_equal(apply_read(p, x), x));
}

TEST(ApplyRead, AdapterMatchesHandComputation) {
  // A = [[1, 0]], B = [[2, 3]]: y = x + B^T (A x) = x + x0 * (2, 3).
  DeltaAdapterPayload p{1, 2, {1, 0}, {2, 3}};
  EXPECT_EQ(apply_read(p, Vec{1, 5}), (Vec{3, 8}));
}

TEST(ApplyRead, DimensionMismatchThrows) {
  EXPECT_THROW(apply_read(zero_fast_weight(4), Vec{1, 2}), BackendError);
}

TEST(TailAppend, GrowsAndFlagsBoundary) {
  TailBuffer t{128, {}};
  t = tail_append(std::move(t), Vec{1, 2});
  EXPECT_EQ(t.length(), 1u);
  for (int i = 0; i < 126; ++i) t = tail_append(std::move(t), Vec{1, 2});
  EXPECT_FALSE(t.boundary_ready());
  t = tail_append(std::move(t), Vec{1, 2});
  EXPECT_EQ(t.length(), 128u);
  EXPECT_TRUE(t.boundary_ready());
  EXPECT_THROW(tail_append(t, Vec{1, 2}), BackendError);
}

TEST(TailAppend, DoesNotMutateInput) {
  const TailBuffer t{4, {{1.0}}};
  const TailBuffer u = tail_append(t, Vec{2.0});
  EXPECT_EQ(t.length(), 1u);
  EXPECT_EQ(u.length(), 2u);
}

TEST(MakeEvidence, EqualTokensGiveThatToken) {
  const Vec v{0.5, -0.25, 1.0};
  TailBuffer t{4, {v, v, v, v}};
  const UpdateEvidence e = make_evidence(t);
  EXPECT_EQ(e.mean, v);
  EXPECT_EQ(e.count, 4u);
}

TEST(MakeEvidence, TwoUnitVectors) {
  TailBuffer t{2, {{1, 0}, {0, 1}}};
  EXPECT_EQ(make_evidence(t).mean, (Vec{0.5, 0.5}));
}

TEST(MakeEvidence, RequiresFullTail) {
  TailBuffer t{3, {{1, 0}}};
  EXPECT_THROW(make_evidence(t), BackendError);
}

TEST(BoundaryUpdate, ZeroMeanLeavesZero) {
  const BackendPayload next =
      boundary_update(zero_fast_weight(2), UpdateEvidence{{0, 0}, 2});
  EXPECT_EQ(flatten(next), (Vec{0, 0, 0, 0}));
}

TEST(BoundaryUpdate, OnesMeanGivesScaledOuterProduct) {
  const BackendPayload next =
      boundary_update(zero_fast_weight(2), UpdateEvidence{{1, 1}, 2});
  EXPECT_EQ(flatten(next), (Vec{0.01, 0.01, 0.01, 0.01}));
}

TEST(BoundaryUpdate, AdapterUpdatesAOnly) {
  // A' = A + eta (A m) m^T with A = [[1, 0]], m = (1, 1): A m = 1.
  DeltaAdapterPayload p{1, 2, {1, 0}, {2, 3}};
  const auto next = std::get<DeltaAdapterPayload>(
      boundary_update(p, UpdateEvidence{{1, 1}, 2}));
  EXPECT_EQ(next.a, (Vec{1.01, 0.01}));
  EXPECT_EQ(next.b, p.b);
}

TEST(BoundaryUpdate, PureFunction) {
  const FastWeightPayload w = identity2();
  const BackendPayload in = w;
  boundary_update(in, UpdateEvidence{{1, 2}, 2});
  EXPECT_TRUE(bit_equal(in, BackendPayload{w}));
}

TEST(ShapeClass, EqualityFollowsFields) {
  OperatorShapeClass a, b;
  EXPECT_EQ(a, b);
  b.hidden = 16;
  EXPECT_NE(a, b);
  OperatorShapeClass adapter;
  adapter.rank = 4;
  EXPECT_NE(a, adapter);
}

TEST(GenToken, DeterministicAndBounded) {
  const Vec a = gen_token(OwnerId{5}, 4100, 7, 8);
  const Vec b = gen_token(OwnerId{5}, 4100, 7, 8);
  EXPECT_TRUE(bit_equal(a, b));
  for (double v : a) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(GenToken, KeyedByEveryInput) {
  const Vec base = gen_token(OwnerId{1}, 10, 0, 8);
  EXPECT_FALSE(bit_equal(base, gen_token(OwnerId{2}, 10, 0, 8)));
  EXPECT_FALSE(bit_equal(base, gen_token(OwnerId{1}, 11, 0, 8)));
  EXPECT_FALSE(bit_equal(base, gen_token(OwnerId{1}, 10, 1, 8)));
}

TEST(GenToken, NoCollisionsOverTenThousandPositions) {
  std::set<Vec> seen;
  for (std::uint64_t pos = 0; pos < 10000; ++pos) {
    EXPECT_TRUE(seen.insert(gen_token(OwnerId{1}, pos, 0, 8)).second) << pos;
  }
}

TEST(InitialPayload, FastWeightZeroAdapterSeeded) {
  const auto fw = initial_payload(BackendType::kFastWeight, 8, 0, OwnerId{1}, 0);
  EXPECT_EQ(flatten(fw), Vec(64, 0.0));
  const auto da = initial_payload(BackendType::kDeltaAdapter, 8, 4, OwnerId{1}, 0);
  const auto& p = std::get<DeltaAdapterPayload>(da);
  EXPECT_EQ(p.a.size(), 32u);
  bool nonzero = false;
  for (double v : p.a) {
    nonzero = nonzero || v != 0.0;
    EXPECT_LE(std::abs(v), 0.1);
  }
  EXPECT_TRUE(nonzero);
  EXPECT_TRUE(bit_equal(
      da, initial_payload(BackendType::kDeltaAdapter, 8, 4, OwnerId{1}, 0)));
  EXPECT_FALSE(bit_equal(
      da, initial_payload(BackendType::kDeltaAdapter, 8, 4, OwnerId{2}, 0)));
  EXPECT_THROW(initial_payload(BackendType::kDeltaAdapter, 8, 0, OwnerId{1}, 0),
               BackendError);
}

TEST(ParseBackend, NamesRoundTrip) {
  for (auto t : {BackendType::kFastWeight, BackendType::kDeltaAdapter}) {
    EXPECT_EQ(parse_backend_type(to_string(t)), t);
  }
  EXPECT_EQ(parse_backend_type("lora"), BackendType::kDeltaAdapter);
  EXPECT_THROW(parse_backend_type("mystery"), BackendError);
}

}  // namespace
}  // namespace ttt
