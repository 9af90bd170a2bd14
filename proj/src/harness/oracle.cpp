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

#include "ttt/harness/oracle.h"

#include <algorithm>

namespace ttt::harness {

namespace {

OracleRequest run_one(const TraceEntry& s, std::uint64_t seed,
                      std::vector<std::pair<OwnerId, Version>>& log) {
  const OwnerId id{s.stream_id};
  OracleRequest out;
  out.id = id;

  BackendPayload state = initial_payload(s.backend, s.hidden, s.rank, id, seed);
  Version version = 0;
  std::vector<Vec> tail;
  for (std::size_t pos = s.prompt_len - s.tail_offset; pos < s.prompt_len; ++pos) {
    tail.push_back(gen_token(id, pos, seed, s.hidden));
  }

  for (std::size_t q = 1; q <= s.decode_len; ++q) {
    const Vec x = gen_token(id, s.prompt_len + q - 1, seed, s.hidden);
    out.outputs.push_back(apply_read(state, x));
    tail.push_back(x);
    StepRecord rec;
    rec.step = q;
    rec.version_before = version;
    if (tail.size() == s.chunk) {
      rec.rho = Effect::kWrite;
      TailBuffer full{s.chunk, std::move(tail)};
      state = boundary_update(state, make_evidence(full));
      tail.clear();
      ++version;
      log.emplace_back(id, version);
      out.commits.push_back(CommitRecord{id, version, q, flatten(state)});
    }
    rec.version_after = version;
    out.steps.push_back(rec);
  }

  out.final_version = version;
  out.final_payload = std::move(state);
  out.kv_tokens = s.prompt_len + s.decode_len;
  out.position = s.decode_len;
  out.tail_tokens = std::move(tail);
  return out;
}

}  // namespace

OracleRecord sequential_oracle(const Trace& trace, std::uint64_t seed) {
  validate_trace(trace);
  std::vector<const TraceEntry*> order;
  for (const auto& s : trace.streams) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const TraceEntry* a, const TraceEntry* b) {
              return a->stream_id < b->stream_id;
            });
  OracleRecord rec;
  for (const TraceEntry* s : order) {
    rec.requests.push_back(run_one(*s, seed, rec.write_log));
  }
  return rec;
}

}  // namespace ttt::harness
