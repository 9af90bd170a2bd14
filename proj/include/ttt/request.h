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
#include <string>

#include "ttt/backends.h"
#include "ttt/types.h"

namespace ttt {

enum class RequestPhase { kAdmitted, kPrefill, kDecode, kFinished };

std::string_view to_string(RequestPhase phase);

// Inference-side request tuple: current token, KV count, decode position,
// owned state slot and tail metadata.
struct Request {
  OwnerId id;
  BackendType backend = BackendType::kFastWeight;
  OperatorShapeClass shape;
  std::string placement;

  Vec x;                      // input of the next decode step
  std::size_t kv_tokens = 0;  // KV handle, token count only
  std::size_t position = 0;   // decode steps completed
  OwnerId state_ref;
  RequestPhase phase = RequestPhase::kAdmitted;

  TailBuffer tail;  // tokens since the last boundary
  std::size_t prompt_len = 0;
  std::size_t decode_target = 0;
  std::size_t tail_offset = 0;  // prompt tokens pre-seeded into the tail
  Step arrival_step = 0;

  // Global token position of the next decode input.
  std::size_t next_token_position() const { return prompt_len + position; }
  // Whether the next decode step completes a chunk.
  bool next_step_writes() const { return tail.length() + 1 == tail.capacity; }
};

}  // namespace ttt
