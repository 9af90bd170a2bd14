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

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ttt/engine.h"
#include "ttt/harness/contract.h"
#include "ttt/harness/run.h"
#include "ttt/harness/stress.h"

namespace ttt::harness {

inline constexpr int kReportFormatVersion = 1;

nlohmann::json to_json(const RunReport& report);
nlohmann::json to_json(const ContractVerdicts& verdicts);
nlohmann::json to_json(const ScenarioVerdict& verdict);
nlohmann::json to_json(const Ladder& ladder);

// Report document: run fields plus optional contract, stress and ladder
// sections. Serialization is deterministic for identical inputs.
struct ReportDocument {
  std::string command;
  const RunReport* run = nullptr;
  const ContractVerdicts* contract = nullptr;
  std::optional<double> speedup_vs_serial;
  const std::vector<ScenarioVerdict>* stress = nullptr;
  const Ladder* ladder = nullptr;
};

std::string render_report(const ReportDocument& doc);
void write_report_file(const std::string& path, const ReportDocument& doc);

}  // namespace ttt::harness
