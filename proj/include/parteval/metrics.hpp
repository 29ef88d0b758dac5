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

#ifndef PARTEVAL_METRICS_HPP_
#define PARTEVAL_METRICS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parteval/core.hpp"
#include "parteval/importance.hpp"

namespace parteval {

enum class MetricId { kSD, kPC, kDC, kPerturbPositive, kPerturbNegative };

std::string_view to_string(MetricId metric);
MetricId parse_metric_id(std::string_view name);

// Raised under CoveragePolicy::kFailMissing when an image lacks a required
// variant or attribution.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LevelAccuracy {
  double level = 0.0;      // bin centre, fraction of parts removed
  double accuracy = 0.0;   // percent
  std::size_t samples = 0;

  bool operator==(const LevelAccuracy&) const = default;
};

// All values are percentages in [0, 100].  value is 0 when nothing could be
// evaluated; check n_evaluated.
struct MetricResult {
  MetricId metric = MetricId::kSD;
  std::string method_id;
  ClassMode class_mode = ClassMode::kPredicted;
  double value = 0.0;
  std::map<double, double> per_threshold;
  std::vector<LevelAccuracy> per_level;
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;
  // Evaluated images whose threshold selection clamped negative importances.
  std::vector<std::string> clamped_images;

  bool operator==(const MetricResult&) const = default;
};

// Part importances keyed by image id.  Images without an entry are treated as
// missing their attribution.
using ImportanceTable = std::map<std::string, PartImportance>;

ImportanceTable compute_importances(std::span<const ImageRecord> records,
                                    const AttributionKey& key,
                                    Aggregation aggregation);

// Average (fractional) ranks, 1-based.
std::vector<double> fractional_ranks(std::span<const double> values);

// Spearman correlation with average ranks for ties.  nullopt when either
// input is constant.  Throws std::invalid_argument on a size mismatch or
// fewer than two samples.
std::optional<double> spearman_rho(std::span<const double> x,
                                   std::span<const double> y);

enum class Expectation { kPreserved, kChanged };

// Share of images whose prediction is preserved (or changed) after
// inpainting select_threshold_subset(pi, t, direction), per threshold.
// value is the pooled mean over thresholds.  Images must be covered at every
// threshold to be evaluated.
MetricResult threshold_check(std::span<const ImageRecord> records,
                             const ImportanceTable& importances,
                             std::span<const double> thresholds,
                             Direction direction, Expectation expectation,
                             const EvaluationConfig& config);

// Least important parts removed, prediction expected to survive.
MetricResult preservation_check(std::span<const ImageRecord> records,
                                const ImportanceTable& importances,
                                std::span<const double> thresholds,
                                const EvaluationConfig& config);
MetricResult preservation_check(std::span<const ImageRecord> records,
                                const ImportanceTable& importances, double t,
                                const EvaluationConfig& config);

// Most important parts removed, prediction expected to change.
MetricResult deletion_check(std::span<const ImageRecord> records,
                            const ImportanceTable& importances,
                            std::span<const double> thresholds,
                            const EvaluationConfig& config);
MetricResult deletion_check(std::span<const ImageRecord> records,
                            const ImportanceTable& importances, double t,
                            const EvaluationConfig& config);

// Rescaled mean Spearman correlation between part importances and the class
// score drop under single-part removal: 100 * (1/2 + mean(rho)/2).  Images
// with one part or a constant importance/drop vector are skipped.
MetricResult single_deletion(std::span<const ImageRecord> records,
                             const ImportanceTable& importances,
                             const EvaluationConfig& config);

// Bin index in 1..9 for removing k of p parts: round-half-up of 10k/p,
// clamped to the grid.
int level_bin(std::size_t removed, std::size_t part_count);

// Accuracy as parts are inpainted in removal order.  kMostFirst is the
// positive test, kLeastFirst the negative one.  Accuracies are pooled into
// level bins 0.1..0.9; value is 100 times the mean over non-empty bins.
MetricResult perturbation_curve(std::span<const ImageRecord> records,
                                const ImportanceTable& importances,
                                Direction direction,
                                const EvaluationConfig& config);

// Every metric for one method under config.class_mode: SD, PC and DC on
// config.aggregation importances; both perturbation tests on per-part means.
std::vector<MetricResult> evaluate_method(std::span<const ImageRecord> records,
                                          const std::string& method_id,
                                          const EvaluationConfig& config);

}  // namespace parteval

#endif  // PARTEVAL_METRICS_HPP_
