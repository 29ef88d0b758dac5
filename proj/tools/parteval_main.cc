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

// parteval: plan, evaluate and compare part-perturbation experiments.
//
//   parteval plan   --manifest m.json [--budget 32]
//   parteval eval   --manifest m.json [--config c.json] [--out dir] ...
//   parteval otdd   --reference ref.json --compare a.json b.json [--out t.csv]
//   parteval report --in report.json [--format csv|markdown|curves]

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "parteval/commands.hpp"
#include "parteval/metrics.hpp"
#include "parteval/raster_io.hpp"

namespace {

using namespace parteval;

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ProtocolError("bad threshold '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Part-based faithfulness evaluation of explanation methods"};
  app.require_subcommand(1);

  // plan
  std::string plan_manifest;
  std::size_t budget = kDefaultPlanBudget;
  auto* plan = app.add_subcommand("plan", "Write perturbation plans into a manifest");
  plan->add_option("--manifest", plan_manifest, "Manifest JSON")->required();
  plan->add_option("--budget", budget, "Max subsets per image")
      ->check(CLI::PositiveNumber);

  // eval
  std::string eval_manifest, config_file, thresholds, class_mode, aggregation,
      coverage, score_fn, accuracy_ref, model_id, eval_out;
  std::vector<std::string> methods;
  std::size_t workers = 0;
  auto* eval = app.add_subcommand("eval", "Compute SD, PC, DC and perturbation AUCs");
  eval->add_option("--manifest", eval_manifest, "Manifest JSON")->required();
  eval->add_option("--config", config_file, "Config JSON");
  eval->add_option("--thresholds", thresholds, "Comma separated, e.g. 0.2,0.4");
  eval->add_option("--class-mode", class_mode, "predicted | target | all")
      ->check(CLI::IsMember({"predicted", "target", "all"}));
  eval->add_option("--aggregation", aggregation, "sum | mean")
      ->check(CLI::IsMember({"sum", "mean"}));
  eval->add_option("--coverage", coverage, "skip | fail")
      ->check(CLI::IsMember({"skip", "fail"}));
  eval->add_option("--score-fn", score_fn, "softmax | logit")
      ->check(CLI::IsMember({"softmax", "logit"}));
  eval->add_option("--accuracy-reference", accuracy_ref,
                   "auto | original_prediction | ground_truth")
      ->check(CLI::IsMember({"auto", "original_prediction", "ground_truth"}));
  eval->add_option("--methods", methods, "Restrict to these method ids");
  eval->add_option("--model-id", model_id, "Override the manifest's model id");
  eval->add_option("--workers", workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_out, "Output directory");

  // otdd
  std::string reference, otdd_out, otdd_format = "csv";
  std::vector<std::string> compared;
  double epsilon = 0.0;
  OtddOptions solver;
  auto* otdd = app.add_subcommand("otdd", "Dataset distances against a reference");
  otdd->add_option("--reference", reference, "Reference point cloud")->required();
  otdd->add_option("--compare", compared, "Point clouds to compare")->required();
  otdd->add_option("--epsilon", epsilon,
                   "Absolute entropic regularization (default 0.05 x mean cost)")
      ->check(CLI::PositiveNumber);
  otdd->add_option("--max-iter", solver.max_iter, "Sinkhorn iteration cap");
  otdd->add_option("--tol", solver.tol, "Marginal violation tolerance (L1)");
  otdd->add_option("--workers", solver.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  otdd->add_option("--out", otdd_out, "Write the CSV table here");
  otdd->add_option("--format", otdd_format, "Stdout format: csv | markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));

  // report
  std::string report_in, report_format = "csv", report_out;
  auto* report = app.add_subcommand("report", "Re-render a report.json");
  report->add_option("--in", report_in, "report.json")->required();
  report->add_option("--format", report_format, "csv | markdown | curves")
      ->check(CLI::IsMember({"csv", "markdown", "curves"}));
  report->add_option("--out", report_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) {
      const Manifest m = cmd_plan(plan_manifest, budget);
      std::cout << "planned " << m.images.size() << " image(s) with budget "
                << budget << "\n";
    } else if (*eval) {
      EvalOptions options;
      options.manifest = eval_manifest;
      if (!config_file.empty()) {
        options.settings = parse_settings(read_file(config_file), config_file);
      }
      EvaluationConfig& config = options.settings.config;
      if (!thresholds.empty()) config.thresholds = parse_thresholds(thresholds);
      if (!class_mode.empty()) {
        options.settings.class_modes =
            class_mode == "all"
                ? std::vector{ClassMode::kPredicted, ClassMode::kTarget}
                : std::vector{parse_class_mode(class_mode)};
      }
      if (!aggregation.empty()) config.aggregation = parse_aggregation(aggregation);
      if (!coverage.empty()) config.coverage_policy = parse_coverage_policy(coverage);
      if (!score_fn.empty()) config.score_fn = parse_score_fn(score_fn);
      if (!accuracy_ref.empty()) {
        config.accuracy_reference =
            accuracy_ref == "auto"
                ? std::nullopt
                : std::optional(parse_accuracy_reference(accuracy_ref));
      }
      if (!methods.empty()) options.settings.methods = methods;
      if (workers > 0) config.workers = workers;
      if (!model_id.empty()) options.model_id = model_id;
      options.out_dir = eval_out;
      const MetricReport r = cmd_eval(options);
      std::cout << report_to_csv(r);
    } else if (*otdd) {
      OtddCommandOptions options;
      options.reference = reference;
      options.compared.assign(compared.begin(), compared.end());
      if (epsilon > 0.0) solver.epsilon = epsilon;
      options.solver = solver;
      options.out_csv = otdd_out;
      const auto rows = cmd_otdd(options);
      std::cout << (otdd_format == "markdown" ? otdd_table_markdown(rows)
                                              : otdd_table_csv(rows));
    } else if (*report) {
      const ReportFormat format = report_format == "markdown"
                                      ? ReportFormat::kMarkdown
                                  : report_format == "curves"
                                      ? ReportFormat::kCurves
                                      : ReportFormat::kCsv;
      const std::string text = cmd_report(report_in, format);
      if (report_out.empty()) {
        std::cout << text;
      } else {
        write_file_atomic(report_out, text);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "parteval: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
