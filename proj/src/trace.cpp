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

#include "ttt/trace.h"

#include <set>
#include <stdexcept>

namespace ttt {

std::size_t Trace::decode_tokens() const {
  std::size_t n = 0;
  for (const auto& s : streams) n += s.decode_len;
  return n;
}

void validate_trace(const Trace& trace) {
  std::set<std::uint64_t> ids;
  for (const auto& s : trace.streams) {
    const std::string where = "stream " + std::to_string(s.stream_id) + ": ";
    if (!ids.insert(s.stream_id).second) {
      throw std::invalid_argument(where + "duplicate stream id");
    }
    if (s.arrival_step < 0) throw std::invalid_argument(where + "negative arrival");
    if (s.chunk == 0) throw std::invalid_argument(where + "chunk must be >= 1");
    if (s.hidden == 0) throw std::invalid_argument(where + "hidden must be >= 1");
    if (s.backend == BackendType::kDeltaAdapter && s.rank == 0) {
      throw std::invalid_argument(where + "adapter rank must be >= 1");
    }
    if (s.tail_offset >= s.chunk) {
      throw std::invalid_argument(where + "tail offset must be < chunk");
    }
    if (s.tail_offset > s.prompt_len) {
      throw std::invalid_argument(where + "tail offset exceeds prompt");
    }
  }
}

}  // namespace ttt
