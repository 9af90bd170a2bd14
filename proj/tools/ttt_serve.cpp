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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ttt/harness/report.h"
#include "ttt/harness/run.h"
#include "ttt/harness/stress.h"
#include "ttt/harness/trace_gen.h"

namespace {

using namespace ttt;
using namespace ttt::harness;

struct Flags {
  std::string trace = "uniform";
  std::optional<std::size_t> streams;
  std::optional<std::size_t> prompt;
  std::optional<std::size_t> decode;
  std::optional<std::size_t> chunk;
  std::string backend = "fast-weight";
  std::size_t hidden = kDefaultHidden;
  std::size_t rank = kDefaultRank;
  std::string mode = "full";
  std::size_t batch = 8;
  Step wait = 4;
  std::uint64_t seed = 0;
  CostModel cost;
  std::string report;
  std::string inject;
  Step inject_step = -1;
  std::optional<std::size_t> inject_slot;
  bool parallel = false;
  bool no_rollback = false;
  std::string out;
};

Trace build_trace(const Flags& f) {
  const bool is_preset = f.trace == "uniform" || f.trace == "bursty" ||
                         f.trace == "bursty-update" || f.trace == "all-update" ||
                         f.trace == "16k";
  if (!is_preset) return load_trace_file(f.trace);
  TraceSpec spec = preset(f.trace == "bursty-update" ? "bursty" : f.trace);
  if (f.streams) spec.streams = *f.streams;
  if (f.prompt) spec.prompt_len = *f.prompt;
  if (f.decode) spec.decode_len = *f.decode;
  if (f.chunk) spec.chunk = *f.chunk;
  spec.hidden = f.hidden;
  spec.rank = f.rank;
  spec.seed = f.seed;
  if (f.backend == "mixed") {
    spec.backends = {BackendType::kFastWeight, BackendType::kDeltaAdapter};
  } else {
    spec.backends = {parse_backend_type(f.backend)};
  }
  Trace trace = generate_trace(spec);
  for (const auto& w : trace_warnings(trace)) std::cerr << "warning: " << w << "\n";
  return trace;
}

RunOptions build_options(const Flags& f) {
  RunOptions o;
  o.mode = parse_run_mode(f.mode);
  o.planner.target_batch = f.batch;
  o.planner.wait_budget = f.wait;
  o.cost = f.cost;
  o.seed = f.seed;
  o.engine.parallel_groups = f.parallel;
  o.engine.parallel_slots = f.parallel;
  o.engine.rollback_enabled = !f.no_rollback;
  if (!f.inject.empty()) {
    FailureSpec spec = default_spec(parse_failure_scenario(f.inject));
    if (f.inject_step >= 0) spec.at_step = f.inject_step;
    if (f.inject_slot) spec.slot = *f.inject_slot;
    o.inject = spec;
  }
  return o;
}

void print_summary(const RunReport& r) {
  std::printf("mode=%s pattern=%s iterations=%zu tokens=%zu time=%.6f "
              "throughput=%.6f\n",
              r.mode.c_str(), r.pattern.c_str(), r.iterations,
              r.generated_tokens, r.simulated_time, r.throughput);
  std::printf("census prefill=%zu read=%zu write=%zu  max_wait=%lld  "
              "invariants=%s\n",
              r.census.prefill, r.census.read, r.census.write,
              static_cast<long long>(r.max_wait),
              r.invariants.all() ? "ok" : "VIOLATED");
  for (const auto& note : r.invariants.notes) std::printf("  note: %s\n", note.c_str());
  for (const auto& fr : r.failures) {
    std::printf("  injected %s at step %lld on %s: %s -> %s\n",
                std::string(to_string(fr.scenario)).c_str(),
                static_cast<long long>(fr.step), fr.group_key.c_str(),
                fr.detail.c_str(), fr.recovery.c_str());
  }
}

void print_contract(const ContractVerdicts& c) {
  for (const auto& v : c.clauses) {
    std::printf("  [%s] %s", v.passed ? "pass" : "FAIL",
                std::string(to_string(v.clause)).c_str());
    if (!v.passed) {
      std::printf(" owner=%s step=%s: %s",
                  v.owner ? to_string(*v.owner).c_str() : "-",
                  v.step ? std::to_string(*v.step).c_str() : "-",
                  v.detail.c_str());
    }
    std::printf("\n");
  }
  std::printf("contract %zu/%zu\n", c.passed_count(), kClauseCount);
}

void maybe_write(const Flags& f, const ReportDocument& doc) {
  if (!f.report.empty()) write_report_file(f.report, doc);
}

int cmd_run(const Flags& f) {
  const Trace trace = build_trace(f);
  const RunOptions opts = build_options(f);
  const RunReport report = run_trace(trace, opts);
  print_summary(report);
  maybe_write(f, ReportDocument{"run", &report});
  return report.invariants.all() ? 0 : 1;
}

int cmd_verify(const Flags& f) {
  const Trace trace = build_trace(f);
  const RunOptions opts = build_options(f);
  const VerifyResult result = verify_trace(trace, opts);
  print_summary(result.report);
  print_contract(result.contract);
  ReportDocument doc{"verify", &result.report, &result.contract};
  maybe_write(f, doc);
  return result.passed() ? 0 : 1;
}

int cmd_stress(const Flags& f) {
  StressOptions opts;
  opts.backend = parse_backend_type(f.backend == "mixed" ? "fast-weight" : f.backend);
  opts.seed = f.seed;
  opts.planner = PlannerConfig{f.batch, f.wait, PlanMode::kFull};
  opts.engine.rollback_enabled = !f.no_rollback;
  opts.engine.parallel_groups = f.parallel;
  opts.engine.parallel_slots = f.parallel;
  const auto verdicts = stress_suite(opts);
  std::size_t passed = 0;
  for (const auto& v : verdicts) {
    passed += v.passed ? 1 : 0;
    std::printf("[%s] %-22s contract %zu/6  %s\n        recovery: %s\n",
                v.passed ? "pass" : "FAIL",
                std::string(to_string(v.scenario)).c_str(),
                v.contract.passed_count(), v.injected_group.c_str(),
                v.recovery.empty() ? v.detail.c_str() : v.recovery.c_str());
  }
  std::printf("stress %zu/%zu pass\n", passed, verdicts.size());
  ReportDocument doc{"stress"};
  doc.stress = &verdicts;
  maybe_write(f, doc);
  return passed == verdicts.size() ? 0 : 1;
}

int cmd_bench(const Flags& f) {
  const Trace trace = build_trace(f);
  const Ladder ladder = run_ladder(trace, build_options(f));
  std::printf("%-16s %14s %12s %12s %10s\n", "mode", "throughput",
              "vs serial", "vs replicas", "contract");
  bool ok = true;
  for (const auto& row : ladder.rows) {
    ok = ok && row.contract_passed;
    std::printf("%-16s %14.6f %11.3fx %11.3fx %10s\n",
                std::string(to_string(row.mode)).c_str(), row.throughput,
                row.speedup_vs_serial, row.speedup_vs_replicas,
                row.contract_passed ? "6/6" : "FAIL");
  }
  std::printf("ladder monotone: %s\n", ladder.monotone() ? "yes" : "no");
  ReportDocument doc{"bench"};
  doc.ladder = &ladder;
  maybe_write(f, doc);
  return ok ? 0 : 1;
}

int cmd_gen_trace(const Flags& f) {
  const Trace trace = build_trace(f);
  if (f.out.empty() || f.out == "-") {
    write_trace(std::cout, trace);
    return 0;
  }
  std::ofstream os(f.out, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + f.out);
  write_trace(os, trace);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Read-write test-time-training serving simulator"};
  app.set_config("--config", "", "TOML/INI file with flag defaults");
  app.require_subcommand(1);
  Flags f;

  app.add_option("--trace", f.trace,
                 "uniform | bursty | all-update | 16k | path to a .jsonl trace");
  app.add_option("--streams", f.streams, "Number of request streams");
  app.add_option("--prompt", f.prompt, "Prompt tokens per stream");
  app.add_option("--decode", f.decode, "Decode tokens per stream");
  app.add_option("--chunk", f.chunk, "Tokens between update boundaries");
  app.add_option("--backend", f.backend, "fast-weight | delta-adapter | mixed");
  app.add_option("--hidden", f.hidden, "Hidden dimension d");
  app.add_option("--rank", f.rank, "Adapter rank");
  app.add_option("--mode", f.mode, "serial | replicas | phase-grouping | full");
  app.add_option("--batch", f.batch, "Target batch size B")->check(CLI::PositiveNumber);
  app.add_option("--wait", f.wait, "Wait budget w in decode steps")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", f.seed, "Token/trace seed");
  app.add_option("--cost-launch", f.cost.t_launch, "Per-group launch cost");
  app.add_option("--cost-read", f.cost.t_read_member, "Per-slot read cost");
  app.add_option("--cost-write", f.cost.t_write_member, "Per-slot write cost");
  app.add_option("--cost-commit", f.cost.t_commit, "Per-owner commit cost");
  app.add_option("--cost-plan", f.cost.t_plan, "Per-iteration planning cost");
  app.add_option("--cost-prefill", f.cost.t_prefill_unit, "Per prompt token prefill cost");
  app.add_option("--replicas", f.cost.replica_cap, "Replica count for the replicas baseline");
  app.add_option("--report", f.report, "Write a JSON report here");
  app.add_option("--inject", f.inject,
                 "mid-group-write-fail | version-mismatch | owner-map-collision | "
                 "stale-read-attempt | rollback-retry");
  app.add_option("--inject-step", f.inject_step, "Earliest step for --inject");
  app.add_option("--inject-slot", f.inject_slot, "Target slot for --inject");
  app.add_flag("--parallel", f.parallel, "Execute groups and slots on OpenMP threads");
  app.add_flag("--no-rollback", f.no_rollback, "Disable rollback (negative control)");

  int rc = 0;
  auto* run = app.add_subcommand("run", "Run a trace and write a RunReport");
  auto* verify = app.add_subcommand("verify", "Run, replay the sequential oracle and compare");
  auto* stress = app.add_subcommand("stress", "Injected-failure suite on the uniform trace");
  auto* bench = app.add_subcommand("bench", "Throughput ladder: serial, replicas, phase-grouping, full");
  auto* gen = app.add_subcommand("gen-trace", "Emit a trace file");
  gen->add_option("--out", f.out, "Output path (default stdout)");
  for (auto* sub : {run, verify, stress, bench, gen}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) rc = cmd_run(f);
    if (*verify) rc = cmd_verify(f);
    if (*stress) rc = cmd_stress(f);
    if (*bench) rc = cmd_bench(f);
    if (*gen) rc = cmd_gen_trace(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
