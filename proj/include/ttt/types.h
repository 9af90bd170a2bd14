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

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ttt {

using Vec = std::vector<double>;

// Per-owner committed update counter. 0 means registered and never updated.
using Version = std::uint64_t;

// Simulated decode-step clock used by the planner and engine.
using Step = std::int64_t;

struct OwnerId {
  std::uint64_t value = 0;

  friend auto operator<=>(const OwnerId&, const OwnerId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, OwnerId id) {
  return os << "r" << id.value;
}

inline std::string to_string(OwnerId id) {
  return "r" + std::to_string(id.value);
}

enum class Effect : std::uint8_t { kRead = 0, kWrite = 1 };

std::string_view to_string(Effect effect);

enum class BackendType : std::uint8_t { kFastWeight = 0, kDeltaAdapter = 1 };

std::string_view to_string(BackendType type);
BackendType parse_backend_type(std::string_view text);

// True when both vectors hold identical bit patterns.
bool bit_equal(const Vec& a, const Vec& b);

}  // namespace ttt

template <>
struct std::hash<ttt::OwnerId> {
  std::size_t operator()(ttt::OwnerId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
