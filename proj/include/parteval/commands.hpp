/* Copyright 2026 The parteval Authors. All Rights Reserved.

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

// Entry points behind the command-line verbs.  They live in the library so
// that tests can drive them without spawning processes.

#ifndef PARTEVAL_COMMANDS_HPP_
#define PARTEVAL_COMMANDS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "parteval/dataset.hpp"
#include "parteval/manifest.hpp"
#include "parteval/otdd.hpp"
#include "parteval/planner.hpp"
#include "parteval/report.hpp"

namespace parteval {

// Writes deterministic plans into the manifest in place and returns it.
// Throws PlanError naming every image with more parts than the budget.
Manifest cmd_plan(const std::filesystem::path& manifest_path,
                  std::size_t budget = kDefaultPlanBudget);

struct EvalOptions {
  std::filesystem::path manifest;
  EvalSettings settings;
  std::optional<std::string> model_id;  // overrides the manifest's
  std::filesystem::path out_dir;        // empty: nothing written
};

MetricReport evaluate_dataset(const Dataset& dataset,
                              const EvalSettings& settings,
                              const std::string& model_id);

// Loads the dataset and evaluates it.  With out_dir set, writes report.json,
// report.csv and curves.csv there.
MetricReport cmd_eval(const EvalOptions& options);

struct OtddCommandOptions {
  std::filesystem::path reference;
  std::vector<std::filesystem::path> compared;
  OtddOptions solver;
  std::filesystem::path out_csv;  // empty: nothing written
};

// One row per compared cloud against the reference.  Throws ProtocolError
// when feature dimensions disagree across files.
std::vector<OtddRow> cmd_otdd(const OtddCommandOptions& options);

enum class ReportFormat { kCsv, kMarkdown, kCurves };

// Re-renders a report.json.
std::string cmd_report(const std::filesystem::path& report_json,
                       ReportFormat format);

}  // namespace parteval

#endif  // PARTEVAL_COMMANDS_HPP_
