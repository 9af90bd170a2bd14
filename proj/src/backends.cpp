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

#include "ttt/backends.h"

#include <cmath>
#include <cstring>
#include <sstream>

namespace ttt {

std::string_view to_string(Effect effect) {
  return effect == Effect::kRead ? "read" : "write";
}

std::string_view to_string(BackendType type) {
  return type == BackendType::kFastWeight ? "fast-weight" : "delta-adapter";
}

BackendType parse_backend_type(std::string_view text) {
  if (text == "fast-weight" || text == "fastweight" || text == "fw") {
    return BackendType::kFastWeight;
  }
  if (text == "delta-adapter" || text == "deltaadapter" || text == "lora") {
    return BackendType::kDeltaAdapter;
  }
  throw BackendError("unknown backend type: " + std::string(text));
}

bool bit_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::string to_string(const OperatorShapeClass& shape) {
  std::ostringstream os;
  os << shape.dtype << "/d" << shape.hidden << "/c" << shape.chunk << "/r"
     << shape.rank << "/" << shape.layer_set;
  return os.str();
}

BackendType backend_of(const BackendPayload& payload) {
  return std::holds_alternative<FastWeightPayload>(payload)
             ? BackendType::kFastWeight
             : BackendType::kDeltaAdapter;
}

std::size_t hidden_of(const BackendPayload& payload) {
  return std::visit([](const auto& p) { return p.hidden; }, payload);
}

Vec flatten(const BackendPayload& payload) {
  if (const auto* fw = std::get_if<FastWeightPayload>(&payload)) {
    return fw->w;
  }
  const auto& da = std::get<DeltaAdapterPayload>(payload);
  Vec out;
  out.reserve(da.a.size() + da.b.size());
  out.insert(out.end(), da.a.begin(), da.a.end());
  out.insert(out.end(), da.b.begin(), da.b.end());
  return out;
}

bool bit_equal(const BackendPayload& a, const BackendPayload& b) {
  if (a.index() != b.index()) return false;
  if (const auto* fa = std::get_if<FastWeightPayload>(&a)) {
    const auto& fb = std::get<FastWeightPayload>(b);
    return fa->hidden == fb.hidden && bit_equal(fa->w, fb.w);
  }
  const auto& da = std::get<DeltaAdapterPayload>(a);
  const auto& db = std::get<DeltaAdapterPayload>(b);
  return da.rank == db.rank && da.hidden == db.hidden && bit_equal(da.a, db.a) &&
         bit_equal(da.b, db.b);
}

FastWeightPayload zero_fast_weight(std::size_t hidden) {
  return FastWeightPayload{hidden, Vec(hidden * hidden, 0.0)};
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Salts keep the adapter init stream disjoint from token streams.
constexpr std::uint64_t kAdapterSaltA = 0xa0a0a0a0ULL;
constexpr std::uint64_t kAdapterSaltB = 0xb0b0b0b0ULL;

void check_dims(const BackendPayload& payload, std::size_t n) {
  if (hidden_of(payload) != n) {
    throw BackendError("dimension mismatch: payload d=" +
                       std::to_string(hidden_of(payload)) +
                       " input d=" + std::to_string(n));
  }
}

}  // namespace

double unit_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                    std::uint64_t c) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + 2 * kGolden));
  h = mix64(h ^ (c + 3 * kGolden));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

BackendPayload initial_payload(BackendType type, std::size_t hidden,
                               std::size_t rank, OwnerId owner,
                               std::uint64_t seed) {
  if (hidden == 0) throw BackendError("hidden dimension must be positive");
  if (type == BackendType::kFastWeight) return zero_fast_weight(hidden);
  if (rank == 0) throw BackendError("adapter rank must be >= 1");
  DeltaAdapterPayload p{rank, hidden, Vec(rank * hidden), Vec(rank * hidden)};
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    p.a[i] = 0.1 * (2.0 * unit_uniform(seed, owner.value, kAdapterSaltA, i) - 1.0);
    p.b[i] = 0.1 * (2.0 * unit_uniform(seed, owner.value, kAdapterSaltB, i) - 1.0);
  }
  return p;
}

Vec apply_read(const BackendPayload& payload, std::span<const double> x) {
  const std::size_t d = x.size();
  check_dims(payload, d);
  Vec y(d);
  if (const auto* fw = std::get_if<FastWeightPayload>(&payload)) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += fw->w[i * d + j] * x[j];
      y[i] = x[i] + acc;
    }
    return y;
  }
  const auto& da = std::get<DeltaAdapterPayload>(payload);
  Vec t(da.rank);
  for (std::size_t k = 0; k < da.rank; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += da.a[k * d + j] * x[j];
    t[k] = acc;
  }
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < da.rank; ++k) acc += da.b[k * d + j] * t[k];
    y[j] = x[j] + acc;
  }
  return y;
}

TailBuffer tail_append(TailBuffer tail, std::span<const double> x) {
  if (tail.length() >= tail.capacity) {
    throw BackendError("tail overflow: boundary should have fired at " +
                       std::to_string(tail.capacity) + " tokens");
  }
  tail.tokens.emplace_back(x.begin(), x.end());
  return tail;
}

UpdateEvidence make_evidence(const TailBuffer& tail) {
  if (tail.capacity == 0 || !tail.boundary_ready()) {
    throw BackendError("evidence requires a full tail (" +
                       std::to_string(tail.length()) + "/" +
                       std::to_string(tail.capacity) + ")");
  }
  const std::size_t d = tail.tokens.front().size();
  Vec sum(d, 0.0);
  for (const auto& tok : tail.tokens) {
    if (tok.size() != d) throw BackendError("ragged tail tokens");
    for (std::size_t i = 0; i < d; ++i) sum[i] += tok[i];
  }
  const double n = static_cast<double>(tail.length());
  for (auto& v : sum) v /= n;
  return UpdateEvidence{std::move(sum), tail.length()};
}

BackendPayload boundary_update(const BackendPayload& payload,
                               const UpdateEvidence& evidence) {
  const auto& m = evidence.mean;
  const std::size_t d = m.size();
  check_dims(payload, d);
  if (const auto* fw = std::get_if<FastWeightPayload>(&payload)) {
    FastWeightPayload next = *fw;
    for (std::size_t i = 0; i < d; ++i) {
      const double scaled = kUpdateRate * m[i];
      for (std::size_t j = 0; j < d; ++j) next.w[i * d + j] += scaled * m[j];
    }
    return next;
  }
  const auto& da = std::get<DeltaAdapterPayload>(payload);
  DeltaAdapterPayload next = da;
  for (std::size_t k = 0; k < da.rank; ++k) {
    double am = 0.0;
    for (std::size_t j = 0; j < d; ++j) am += da.a[k * d + j] * m[j];
    const double scaled = kUpdateRate * am;
    for (std::size_t j = 0; j < d; ++j) next.a[k * d + j] += scaled * m[j];
  }
  return next;
}

Vec gen_token(OwnerId owner, std::uint64_t position, std::uint64_t seed,
              std::size_t hidden) {
  Vec x(hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    x[i] = 2.0 * unit_uniform(seed, owner.value, position, i) - 1.0;
  }
  return x;
}

}  // namespace ttt
