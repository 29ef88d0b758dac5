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

#include "parteval/commands.hpp"

#include <algorithm>
#include <set>

#include "parteval/metrics.hpp"
#include "parteval/raster_io.hpp"

namespace parteval {

namespace fs = std::filesystem;

Manifest cmd_plan(const fs::path& manifest_path, std::size_t budget) {
  Manifest manifest = load_manifest(manifest_path);

  std::vector<std::string> offending;
  for (const ManifestImage& img : manifest.images) {
    if (img.part_ids.size() > budget) {
      offending.push_back(img.image_id + " (" +
                          std::to_string(img.part_ids.size()) + " parts)");
    }
  }
  if (!offending.empty()) {
    std::string msg = manifest_path.string() + ": budget " +
                      std::to_string(budget) +
                      " cannot cover single-part deletions for:";
    for (const std::string& o : offending) msg += " " + o;
    throw PlanError(msg);
  }

  for (ManifestImage& img : manifest.images) {
    img.plan = enumerate_plan(img.part_ids, budget);
  }
  manifest.plan_policy = PlanPolicy{budget, std::string(kPlanOrder)};
  save_manifest(manifest_path, manifest);
  return manifest;
}

MetricReport evaluate_dataset(const Dataset& dataset,
                              const EvalSettings& settings,
                              const std::string& model_id) {
  settings.config.validate();
  MetricReport report;
  report.model_id = model_id;
  report.dataset_name = dataset.manifest.dataset_name;
  report.settings = settings;

  const std::vector<AttributionKey> available = dataset.attribution_keys();
  std::vector<std::string> methods;
  if (settings.methods) {
    methods = *settings.methods;
  } else {
    std::set<std::string> names;
    for (const AttributionKey& k : available) names.insert(k.method_id);
    methods.assign(names.begin(), names.end());
  }

  for (const std::string& method : methods) {
    for (ClassMode mode : settings.class_modes) {
      // Class-independent methods only ship predicted-class maps; a mode
      // with no maps at all is absent from the report rather than skipped.
      if (std::find(available.begin(), available.end(),
                    AttributionKey{method, mode}) == available.end()) {
        continue;
      }
      EvaluationConfig config = settings.config;
      config.class_mode = mode;
      for (MetricResult& r : evaluate_method(dataset.images, method, config)) {
        report.results.push_back(std::move(r));
      }
    }
  }
  return report;
}

MetricReport cmd_eval(const EvalOptions& options) {
  const Dataset dataset =
      load_dataset(options.manifest, options.settings.config.workers);
  MetricReport report = evaluate_dataset(
      dataset, options.settings,
      options.model_id.value_or(dataset.manifest.model_id));
  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    write_file_atomic(options.out_dir / "report.json", report_to_json(report));
    write_file_atomic(options.out_dir / "report.csv", report_to_csv(report));
    write_file_atomic(options.out_dir / "curves.csv", curves_to_csv(report));
  }
  return report;
}

std::vector<OtddRow> cmd_otdd(const OtddCommandOptions& options) {
  const LabeledPointCloud reference = read_cloud(options.reference);
  std::vector<OtddRow> rows;
  for (const fs::path& path : options.compared) {
    const LabeledPointCloud cloud = read_cloud(path);
    if (cloud.dim() != reference.dim()) {
      throw ProtocolError(path.string() + ": feature dimension " +
                          std::to_string(cloud.dim()) + " differs from " +
                          std::to_string(reference.dim()) + " in " +
                          options.reference.string());
    }
    OtddRow row;
    row.reference = reference.name;
    row.dataset = cloud.name;
    row.features = reference.features == cloud.features
                       ? cloud.features
                       : reference.features + "|" + cloud.features;
    row.result = otdd_distance(reference, cloud, options.solver);
    row.max_iter = options.solver.max_iter;
    row.tol = options.solver.tol;
    rows.push_back(std::move(row));
  }
  if (!options.out_csv.empty()) {
    write_file_atomic(options.out_csv, otdd_table_csv(rows));
  }
  return rows;
}

std::string cmd_report(const fs::path& report_json, ReportFormat format) {
  const MetricReport report =
      report_from_json(read_file(report_json), report_json.string());
  switch (format) {
    case ReportFormat::kCsv: return report_to_csv(report);
    case ReportFormat::kMarkdown: return report_to_markdown(report);
    case ReportFormat::kCurves: return curves_to_csv(report);
  }
  return {};
}

}  // namespace parteval
