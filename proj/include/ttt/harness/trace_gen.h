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
#include <iosfwd>
#include <string>
#include <vector>

#include "ttt/trace.h"

namespace ttt::harness {

enum class TracePattern { kUniform, kBurstyUpdate, kAllUpdate };

std::string_view to_string(TracePattern pattern);
TracePattern parse_trace_pattern(std::string_view text);

struct TraceSpec {
  std::size_t streams = 8;
  std::size_t prompt_len = 4096;
  std::size_t decode_len = 512;
  std::size_t chunk = 128;
  TracePattern pattern = TracePattern::kUniform;
  // Per-stream admission step; empty means everyone arrives at step 0.
  std::vector<Step> arrival;
  // Per-stream backend, cycled when shorter than `streams`.
  std::vector<BackendType> backends = {BackendType::kFastWeight};
  std::size_t hidden = kDefaultHidden;
  std::size_t rank = kDefaultRank;
  std::uint64_t seed = 0;
};

// Named presets: "uniform", "bursty", "all-update", "16k".
TraceSpec preset(std::string_view name);

// Uniform: aligned boundaries. BurstyUpdate: per-stream tail offsets drawn
// uniformly from [0, chunk) with the trace seed, so boundaries start
// clustered and then skew. AllUpdate: chunk 1, every decode step writes.
Trace generate_trace(const TraceSpec& spec);

// Human-readable warnings (for example a chunk that never fills).
std::vector<std::string> trace_warnings(const Trace& trace);

// Line-delimited JSON, one object per stream:
// {stream_id, arrival_step, prompt_len, decode_len, chunk, backend, dims,
//  tail_offset, placement} with dims = {hidden, rank}.
void write_trace(std::ostream& os, const Trace& trace);
Trace read_trace(std::istream& is);
Trace load_trace_file(const std::string& path);

}  // namespace ttt::harness
