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

#include "ttt/harness/trace_gen.h"

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

namespace ttt::harness {

using nlohmann::json;

std::string_view to_string(TracePattern pattern) {
  switch (pattern) {
    case TracePattern::kUniform:
      return "uniform";
    case TracePattern::kBurstyUpdate:
      return "bursty";
    case TracePattern::kAllUpdate:
      return "all-update";
  }
  return "?";
}

TracePattern parse_trace_pattern(std::string_view text) {
  if (text == "uniform") return TracePattern::kUniform;
  if (text == "bursty" || text == "bursty-update") return TracePattern::kBurstyUpdate;
  if (text == "all-update") return TracePattern::kAllUpdate;
  throw std::invalid_argument("unknown trace pattern: " + std::string(text));
}

TraceSpec preset(std::string_view name) {
  TraceSpec spec;
  if (name == "16k") {
    spec.streams = 7;
    spec.prompt_len = 16384;
    return spec;
  }
  spec.pattern = parse_trace_pattern(name);
  return spec;
}

namespace {

constexpr std::uint64_t kOffsetSalt = 0x0ff5e7ULL;

}  // namespace

Trace generate_trace(const TraceSpec& spec) {
  if (spec.streams == 0) throw std::invalid_argument("trace needs >= 1 stream");
  if (spec.backends.empty()) throw std::invalid_argument("no backend given");
  if (!spec.arrival.empty() && spec.arrival.size() != spec.streams) {
    throw std::invalid_argument("arrival list must have one entry per stream");
  }
  const std::size_t chunk =
      spec.pattern == TracePattern::kAllUpdate ? 1 : spec.chunk;

  Trace trace;
  trace.pattern = std::string(to_string(spec.pattern));
  for (std::size_t i = 0; i < spec.streams; ++i) {
    TraceEntry e;
    e.stream_id = i + 1;
    e.arrival_step = spec.arrival.empty() ? 0 : spec.arrival[i];
    e.prompt_len = spec.prompt_len;
    e.decode_len = spec.decode_len;
    e.chunk = chunk;
    e.backend = spec.backends[i % spec.backends.size()];
    e.hidden = spec.hidden;
    e.rank = e.backend == BackendType::kDeltaAdapter ? spec.rank : 0;
    if (spec.pattern == TracePattern::kBurstyUpdate) {
      const auto draw = unit_uniform(spec.seed, e.stream_id, kOffsetSalt, 0);
      e.tail_offset = std::min<std::size_t>(
          static_cast<std::size_t>(draw * static_cast<double>(chunk)),
          std::min(chunk - 1, spec.prompt_len));
    }
    trace.streams.push_back(std::move(e));
  }
  validate_trace(trace);
  return trace;
}

std::vector<std::string> trace_warnings(const Trace& trace) {
  std::vector<std::string> out;
  for (const auto& s : trace.streams) {
    if (s.tail_offset + s.decode_len < s.chunk) {
      out.push_back("stream " + std::to_string(s.stream_id) + ": chunk " +
                    std::to_string(s.chunk) + " never fills within " +
                    std::to_string(s.decode_len) +
                    " decode tokens; no writes will occur");
    }
  }
  return out;
}

void write_trace(std::ostream& os, const Trace& trace) {
  for (const auto& s : trace.streams) {
    json j = {{"stream_id", s.stream_id},
              {"arrival_step", s.arrival_step},
              {"prompt_len", s.prompt_len},
              {"decode_len", s.decode_len},
              {"chunk", s.chunk},
              {"backend", std::string(to_string(s.backend))},
              {"dims", {{"hidden", s.hidden}, {"rank", s.rank}}},
              {"tail_offset", s.tail_offset},
              {"placement", s.placement}};
    os << j.dump() << '\n';
  }
}

Trace read_trace(std::istream& is) {
  Trace trace;
  trace.pattern = "file";
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      TraceEntry e;
      e.stream_id = j.at("stream_id").get<std::uint64_t>();
      e.arrival_step = j.value("arrival_step", Step{0});
      e.prompt_len = j.at("prompt_len").get<std::size_t>();
      e.decode_len = j.at("decode_len").get<std::size_t>();
      e.chunk = j.at("chunk").get<std::size_t>();
      e.backend = parse_backend_type(j.value("backend", std::string("fast-weight")));
      if (j.contains("dims")) {
        e.hidden = j["dims"].value("hidden", kDefaultHidden);
        e.rank = j["dims"].value("rank", std::size_t{0});
      }
      e.tail_offset = j.value("tail_offset", std::size_t{0});
      e.placement = j.value("placement", std::string("slot0"));
      trace.streams.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                  ": " + ex.what());
    }
  }
  validate_trace(trace);
  return trace;
}

Trace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trace file " + path);
  return read_trace(in);
}

}  // namespace ttt::harness
