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

#ifndef PARTEVAL_REPORT_HPP_
#define PARTEVAL_REPORT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parteval/core.hpp"
#include "parteval/metrics.hpp"
#include "parteval/otdd.hpp"

namespace parteval {

// Resolved settings of an evaluation run.  Embedded in every report.  The
// worker count is deliberately not part of it: it never changes results.
struct EvalSettings {
  EvaluationConfig config;  // config.class_mode is ignored; see class_modes
  std::vector<ClassMode> class_modes{ClassMode::kPredicted, ClassMode::kTarget};
  // Unset: every method that has attributions.
  std::optional<std::vector<std::string>> methods;

  bool operator==(const EvalSettings& other) const;
};

// Config file text (JSON).  Missing keys keep the defaults in `base`; unknown
// keys are rejected.  Accepts "class_mode" (one name or "all") or
// "class_modes" (list).
EvalSettings parse_settings(std::string_view json_text,
                            const std::string& source,
                            EvalSettings base = {});
std::string serialize_settings(const EvalSettings& settings);

struct MetricReport {
  std::string model_id;
  std::string dataset_name;
  EvalSettings settings;
  std::vector<MetricResult> results;

  bool operator==(const MetricReport& other) const;
};

// Two decimals, rounding half up on the shortest decimal spelling of the
// value, so 71.235 prints as "71.24".
std::string format_fixed2(double value);

// model_id,metric,class_mode,method_id,value,n_evaluated,n_skipped
std::string report_to_csv(const MetricReport& report);
// model_id,metric,class_mode,method_id,level,accuracy,samples
std::string curves_to_csv(const MetricReport& report);
std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(std::string_view json_text,
                              const std::string& source);
// One table per model in the layout of a method comparison: rows are
// (metric, class mode), columns are methods, "-" marks missing cells.
std::string report_to_markdown(const MetricReport& report);

struct OtddRow {
  std::string reference;
  std::string dataset;
  std::string features;
  OtddResult result;
  std::size_t max_iter = 0;
  double tol = 0.0;
};

// reference,dataset,otdd,epsilon,max_iter,tol,iterations,converged,features
std::string otdd_table_csv(const std::vector<OtddRow>& rows);
std::string otdd_table_markdown(const std::vector<OtddRow>& rows);

}  // namespace parteval

#endif  // PARTEVAL_REPORT_HPP_
