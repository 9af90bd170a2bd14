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
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "ttt/types.h"

namespace ttt {

// Simulated TTT backends. Every function here is pure: inputs are never
// mutated and per-request arithmetic runs in a fixed order, so results are
// bit-identical regardless of how requests are grouped.

inline constexpr double kUpdateRate = 0.01;
inline constexpr std::size_t kDefaultHidden = 8;
inline constexpr std::size_t kDefaultRank = 4;
inline constexpr std::string_view kDecodeLayers = "decode";
inline constexpr std::string_view kPrefillLayers = "prefill";

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OperatorShapeClass {
  std::string dtype = "f64";
  std::size_t hidden = kDefaultHidden;
  std::size_t chunk = 128;
  std::size_t rank = 0;  // DeltaAdapter only
  std::string layer_set = std::string(kDecodeLayers);

  friend auto operator<=>(const OperatorShapeClass&,
                          const OperatorShapeClass&) = default;
};

std::string to_string(const OperatorShapeClass& shape);

// d x d fast-weight matrix, row-major.
struct FastWeightPayload {
  std::size_t hidden = 0;
  Vec w;
};

// Low-rank adapter delta: A and B are both rank x d, row-major.
struct DeltaAdapterPayload {
  std::size_t rank = 0;
  std::size_t hidden = 0;
  Vec a;
  Vec b;
};

using BackendPayload = std::variant<FastWeightPayload, DeltaAdapterPayload>;

BackendType backend_of(const BackendPayload& payload);
std::size_t hidden_of(const BackendPayload& payload);

// Row-major flattening (A followed by B for adapters).
Vec flatten(const BackendPayload& payload);
bool bit_equal(const BackendPayload& a, const BackendPayload& b);

FastWeightPayload zero_fast_weight(std::size_t hidden);

// Deterministic starting payload. Fast weights start at zero; adapters start
// from small seeded values, since A = 0 is a fixed point of the adapter rule.
BackendPayload initial_payload(BackendType type, std::size_t hidden,
                               std::size_t rank, OwnerId owner,
                               std::uint64_t seed);

struct TailBuffer {
  std::size_t capacity = 0;
  std::vector<Vec> tokens;

  std::size_t length() const { return tokens.size(); }
  bool boundary_ready() const { return tokens.size() == capacity; }
};

struct UpdateEvidence {
  Vec mean;
  std::size_t count = 0;
};

// y = x + W x (fast weight) or y = x + B^T (A x) (adapter).
Vec apply_read(const BackendPayload& payload, std::span<const double> x);

// Appends x; throws when the tail is already at capacity.
TailBuffer tail_append(TailBuffer tail, std::span<const double> x);

// Arithmetic mean of a full tail.
UpdateEvidence make_evidence(const TailBuffer& tail);

// W' = W + eta m m^T, or A' = A + eta (A m) m^T with B unchanged.
BackendPayload boundary_update(const BackendPayload& payload,
                               const UpdateEvidence& evidence);

// Counter-based token stream keyed by (seed, owner, position); entries lie
// in [-1, 1].
Vec gen_token(OwnerId owner, std::uint64_t position, std::uint64_t seed,
              std::size_t hidden);

// Counter-based uniform draw in [0, 1); shared by token and trace generators.
double unit_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                    std::uint64_t c);

}  // namespace ttt
