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

#include "ttt/harness/report.h"

#include <fstream>
#include <stdexcept>

#include "ttt/harness/digest.h"

namespace ttt::harness {

using nlohmann::json;

namespace {

template <typename K>
json histogram(const std::map<K, std::size_t>& h) {
  json out = json::array();
  for (const auto& [k, v] : h) out.push_back(json::array({k, v}));
  return out;
}

json request_json(const RequestRecord& r) {
  std::vector<Vec> commit_payloads;
  for (const auto& c : r.commits) commit_payloads.push_back(c.payload);
  return json{{"owner", r.id.value},
              {"backend", std::string(to_string(r.backend))},
              {"prompt_len", r.prompt_len},
              {"decode_len", r.decode_len},
              {"chunk", r.chunk},
              {"admitted_step", r.admitted_step},
              {"prefill_issue", r.prefill_issue},
              {"finished_step", r.finished_step},
              {"outputs", r.outputs.size()},
              {"output_digest", digest_stream(r.outputs)},
              {"commits", r.commits.size()},
              {"commit_log_digest", digest_stream(commit_payloads)},
              {"final_version", r.final_version},
              {"final_payload", flatten(r.final_payload)},
              {"kv_tokens", r.kv_tokens},
              {"tail_length", r.tail_tokens.size()}};
}

json failure_json(const FailureRecord& f) {
  json members = json::array();
  for (auto m : f.members) members.push_back(m.value);
  return json{{"scenario", std::string(to_string(f.scenario))},
              {"step", f.step},
              {"group_key", f.group_key},
              {"members", members},
              {"slot", f.slot},
              {"detail", f.detail},
              {"recovery", f.recovery}};
}

}  // namespace

json to_json(const RunReport& r) {
  const auto& inv = r.invariants;
  json requests = json::array();
  for (const auto& q : r.requests) requests.push_back(request_json(q));
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back(failure_json(f));

  json out{
      {"mode", r.mode},
      {"pattern", r.pattern},
      {"seed", r.seed},
      {"planner",
       {{"batch", r.planner.target_batch},
        {"wait", r.planner.wait_budget},
        {"mode", std::string(to_string(r.planner.mode))}}},
      {"cost",
       {{"launch", r.cost.t_launch},
        {"read", r.cost.t_read_member},
        {"write", r.cost.t_write_member},
        {"commit", r.cost.t_commit},
        {"prefill_unit", r.cost.t_prefill_unit},
        {"plan", r.cost.t_plan},
        {"replicas", r.cost.replica_cap}}},
      {"iterations", r.iterations},
      {"simulated_time", r.simulated_time},
      {"generated_tokens", r.generated_tokens},
      {"throughput", r.throughput},
      {"census",
       {{"prefill", r.census.prefill},
        {"read", r.census.read},
        {"write", r.census.write},
        {"decode_total", r.census.read + r.census.write}}},
      {"group_sizes",
       {{"prefill", histogram(r.prefill_group_sizes)},
        {"read", histogram(r.read_group_sizes)},
        {"write", histogram(r.write_group_sizes)}}},
      {"wait_histogram", histogram(r.wait_histogram)},
      {"max_wait", r.max_wait},
      {"counters",
       {{"groups_issued", r.groups_issued},
        {"revalidations", r.revalidations},
        {"rejected_groups", r.rejected_groups},
        {"fallback_events", r.fallback_events}}},
      {"invariants",
       {{"phase_separation", inv.phase_separation},
        {"bounded_wait", inv.bounded_wait},
        {"owner_isolation", inv.owner_isolation},
        {"group_atomicity", inv.group_atomicity},
        {"per_request_order", inv.per_request_order},
        {"notes", inv.notes}}},
      {"requests", requests},
      {"failures", failures}};
  if (r.pattern == "bursty") {
    out["pattern_note"] =
        "bursty-update construction: per-stream tail offsets uniform in "
        "[0, chunk) from the seed";
  }
  return out;
}

json to_json(const ContractVerdicts& verdicts) {
  json clauses = json::array();
  for (const auto& c : verdicts.clauses) {
    json j{{"clause", std::string(to_string(c.clause))}, {"passed", c.passed}};
    if (!c.passed) {
      j["owner"] = c.owner ? json(c.owner->value) : json(nullptr);
      j["step"] = c.step ? json(*c.step) : json(nullptr);
      j["detail"] = c.detail;
    }
    clauses.push_back(std::move(j));
  }
  return json{{"passed", verdicts.passed_count()},
              {"total", kClauseCount},
              {"all_passed", verdicts.all_passed()},
              {"clauses", clauses}};
}

json to_json(const ScenarioVerdict& v) {
  return json{{"scenario", std::string(to_string(v.scenario))},
              {"at_step", v.spec.at_step},
              {"slot", v.spec.slot},
              {"fired", v.fired},
              {"passed", v.passed},
              {"contract", to_json(v.contract)},
              {"invariants_ok", v.invariants.all()},
              {"injected_group", v.injected_group},
              {"recovery", v.recovery},
              {"detail", v.detail}};
}

json to_json(const Ladder& ladder) {
  json rows = json::array();
  for (const auto& row : ladder.rows) {
    rows.push_back(json{{"mode", std::string(to_string(row.mode))},
                        {"throughput", row.throughput},
                        {"simulated_time", row.simulated_time},
                        {"speedup_vs_serial", row.speedup_vs_serial},
                        {"speedup_vs_replicas", row.speedup_vs_replicas},
                        {"contract_passed", row.contract_passed}});
  }
  return json{{"rows", rows}, {"monotone", ladder.monotone()}};
}

std::string render_report(const ReportDocument& doc) {
  json out{{"format_version", kReportFormatVersion}, {"command", doc.command}};
  if (doc.run) out["run"] = to_json(*doc.run);
  if (doc.speedup_vs_serial) out["speedup_vs_serial"] = *doc.speedup_vs_serial;
  if (doc.contract) out["contract"] = to_json(*doc.contract);
  if (doc.stress) {
    json s = json::array();
    std::size_t passed = 0;
    for (const auto& v : *doc.stress) {
      s.push_back(to_json(v));
      passed += v.passed ? 1 : 0;
    }
    out["stress"] = {{"scenarios", s},
                     {"passed", passed},
                     {"total", doc.stress->size()}};
  }
  if (doc.ladder) out["ladder"] = to_json(*doc.ladder);
  return out.dump(2) + "\n";
}

void write_report_file(const std::string& path, const ReportDocument& doc) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write report " + path);
  os << render_report(doc);
}

}  // namespace ttt::harness
