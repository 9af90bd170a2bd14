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
#include <string>
#include <vector>

#include "ttt/backends.h"
#include "ttt/types.h"

namespace ttt {

// One request stream of a trace.
struct TraceEntry {
  std::uint64_t stream_id = 0;
  Step arrival_step = 0;
  std::size_t prompt_len = 0;
  std::size_t decode_len = 0;
  std::size_t chunk = 128;
  BackendType backend = BackendType::kFastWeight;
  std::size_t hidden = kDefaultHidden;
  std::size_t rank = 0;
  // Last `tail_offset` prompt tokens start in the tail, shifting this
  // stream's boundaries relative to the others.
  std::size_t tail_offset = 0;
  std::string placement = "slot0";
};

struct Trace {
  std::string pattern = "custom";
  std::vector<TraceEntry> streams;

  std::size_t decode_tokens() const;
};

// Throws std::invalid_argument on a malformed entry (zero chunk, zero hidden,
// adapter without rank, offset past the prompt or chunk, duplicate ids).
void validate_trace(const Trace& trace);

}  // namespace ttt
