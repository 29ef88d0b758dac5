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

#include "parteval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parteval/parallel.hpp"
#include "parteval/planner.hpp"

namespace parteval {

std::string_view to_string(MetricId metric) {
  switch (metric) {
    case MetricId::kSD: return "SD";
    case MetricId::kPC: return "PC";
    case MetricId::kDC: return "DC";
    case MetricId::kPerturbPositive: return "PerturbPositive";
    case MetricId::kPerturbNegative: return "PerturbNegative";
  }
  return "?";
}

MetricId parse_metric_id(std::string_view name) {
  for (MetricId m : {MetricId::kSD, MetricId::kPC, MetricId::kDC,
                     MetricId::kPerturbPositive, MetricId::kPerturbNegative}) {
    if (to_string(m) == name) return m;
  }
  throw ProtocolError("unknown metric '" + std::string(name) + "'");
}

namespace {

// Indices of `records` in ascending image id order.  Every reduction walks
// this order so that floating point sums do not depend on input order.
std::vector<std::size_t> reduction_order(std::span<const ImageRecord> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return records[a].image_id() < records[b].image_id();
                   });
  return order;
}

// Returns false (skip the image) or throws, per coverage policy.
bool missing(const EvaluationConfig& config, const std::string& what) {
  if (config.coverage_policy == CoveragePolicy::kFailMissing) {
    throw CoverageError(what);
  }
  return false;
}

const PartImportance* find_importance(const ImportanceTable& table,
                                      const ImageRecord& record,
                                      const EvaluationConfig& config,
                                      std::string_view metric) {
  const auto it = table.find(record.image_id());
  if (it == table.end()) {
    missing(config, "image '" + record.image_id() + "': no attribution for " +
                        std::string(metric));
    return nullptr;
  }
  return &it->second;
}

const LogitRecord* find_required(const ImageRecord& record,
                                 const PartSubset& subset,
                                 const EvaluationConfig& config,
                                 std::string_view metric) {
  const LogitRecord* variant = record.find_variant(subset);
  if (!variant) {
    missing(config, "image '" + record.image_id() + "': variant '" +
                        subset.key() + "' required by " +
                        std::string(metric) + " is missing");
  }
  return variant;
}

MetricResult start_result(MetricId metric, const ImportanceTable& importances,
                          const EvaluationConfig& config) {
  MetricResult result;
  result.metric = metric;
  result.class_mode = config.class_mode;
  if (!importances.empty()) {
    result.method_id = importances.begin()->second.method_id;
  }
  return result;
}

double percent(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0
                    : 100.0 * static_cast<double>(count) /
                          static_cast<double>(total);
}

}  // namespace

ImportanceTable compute_importances(std::span<const ImageRecord> records,
                                    const AttributionKey& key,
                                    Aggregation aggregation) {
  ImportanceTable table;
  for (const ImageRecord& record : records) {
    if (const AttributionMap* attr = record.find_attribution(key)) {
      table.emplace(record.image_id(),
                    aggregate(*attr, record.annotation, aggregation));
    }
  }
  return table;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[idx[j]] == values[idx[i]]) ++j;
    // Positions i..j-1 (0-based) share the mean 1-based rank.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman_rho(std::span<const double> x,
                                   std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("spearman_rho: vectors differ in length");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("spearman_rho: need at least two samples");
  }
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricResult threshold_check(std::span<const ImageRecord> records,
                             const ImportanceTable& importances,
                             std::span<const double> thresholds,
                             Direction direction, Expectation expectation,
                             const EvaluationConfig& config) {
  const MetricId id = expectation == Expectation::kPreserved ? MetricId::kPC
                                                             : MetricId::kDC;
  const std::string label(to_string(id));

  struct Outcome {
    bool evaluated = false;
    bool clamped = false;
    std::vector<bool> hits;
  };
  std::vector<Outcome> outcomes(records.size());

  parallel_for(records.size(), config.workers, [&](std::size_t i) {
    const ImageRecord& record = records[i];
    const PartImportance* pi =
        find_importance(importances, record, config, label);
    if (!pi) return;
    const ClassId original = predicted_class(record.original());
    Outcome out;
    for (double t : thresholds) {
      const PartSubset subset = select_threshold_subset(*pi, t, direction);
      const LogitRecord* variant = find_required(record, subset, config, label);
      if (!variant) return;
      const bool same = predicted_class(*variant) == original;
      out.hits.push_back(expectation == Expectation::kPreserved ? same : !same);
    }
    out.evaluated = true;
    out.clamped = pi->has_negative();
    outcomes[i] = std::move(out);
  });

  MetricResult result = start_result(id, importances, config);
  std::vector<std::size_t> hits(thresholds.size(), 0);
  for (std::size_t i : reduction_order(records)) {
    const Outcome& out = outcomes[i];
    if (!out.evaluated) {
      ++result.n_skipped;
      continue;
    }
    ++result.n_evaluated;
    if (out.clamped) result.clamped_images.push_back(records[i].image_id());
    for (std::size_t k = 0; k < thresholds.size(); ++k) hits[k] += out.hits[k];
  }
  std::size_t pooled = 0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    result.per_threshold[thresholds[k]] = percent(hits[k], result.n_evaluated);
    pooled += hits[k];
  }
  // Pooling the counts keeps PC + DC == 100 exact on identical subsets.
  result.value = percent(pooled, result.n_evaluated * thresholds.size());
  return result;
}

MetricResult preservation_check(std::span<const ImageRecord> records,
                                const ImportanceTable& importances,
                                std::span<const double> thresholds,
                                const EvaluationConfig& config) {
  return threshold_check(records, importances, thresholds,
                         Direction::kLeastFirst, Expectation::kPreserved,
                         config);
}

MetricResult preservation_check(std::span<const ImageRecord> records,
                                const ImportanceTable& importances, double t,
                                const EvaluationConfig& config) {
  return preservation_check(records, importances, std::span(&t, 1), config);
}

MetricResult deletion_check(std::span<const ImageRecord> records,
                            const ImportanceTable& importances,
                            std::span<const double> thresholds,
                            const EvaluationConfig& config) {
  return threshold_check(records, importances, thresholds,
                         Direction::kMostFirst, Expectation::kChanged, config);
}

MetricResult deletion_check(std::span<const ImageRecord> records,
                            const ImportanceTable& importances, double t,
                            const EvaluationConfig& config) {
  return deletion_check(records, importances, std::span(&t, 1), config);
}

MetricResult single_deletion(std::span<const ImageRecord> records,
                             const ImportanceTable& importances,
                             const EvaluationConfig& config) {
  std::vector<std::optional<double>> rhos(records.size());

  parallel_for(records.size(), config.workers, [&](std::size_t i) {
    const ImageRecord& record = records[i];
    if (record.annotation.part_count() < 2) return;
    const PartImportance* pi = find_importance(importances, record, config, "SD");
    if (!pi) return;
    const LogitRecord& original = record.original();
    const ClassId cls = config.class_mode == ClassMode::kPredicted
                            ? predicted_class(original)
                            : record.ground_truth_label;
    const double base = class_score(original, cls, config.score_fn);

    std::vector<double> claimed;
    std::vector<double> drops;
    for (PartId part : record.annotation.part_ids()) {
      const LogitRecord* variant =
          find_required(record, PartSubset({part}), config, "SD");
      if (!variant) return;
      claimed.push_back(pi->values.at(part));
      drops.push_back(base - class_score(*variant, cls, config.score_fn));
    }
    rhos[i] = spearman_rho(claimed, drops);
  });

  MetricResult result = start_result(MetricId::kSD, importances, config);
  double sum = 0.0;
  for (std::size_t i : reduction_order(records)) {
    if (!rhos[i]) {
      ++result.n_skipped;
      continue;
    }
    ++result.n_evaluated;
    sum += *rhos[i];
  }
  if (result.n_evaluated > 0) {
    const double mean = sum / static_cast<double>(result.n_evaluated);
    result.value = std::clamp(100.0 * (0.5 + 0.5 * mean), 0.0, 100.0);
  }
  return result;
}

int level_bin(std::size_t removed, std::size_t part_count) {
  if (part_count == 0) throw std::invalid_argument("level_bin: no parts");
  const std::size_t rounded = (20 * removed + part_count) / (2 * part_count);
  return static_cast<int>(std::clamp<std::size_t>(rounded, 1, 9));
}

MetricResult perturbation_curve(std::span<const ImageRecord> records,
                                const ImportanceTable& importances,
                                Direction direction,
                                const EvaluationConfig& config) {
  const MetricId id = direction == Direction::kMostFirst
                          ? MetricId::kPerturbPositive
                          : MetricId::kPerturbNegative;
  const std::string label(to_string(id));
  const AccuracyReference reference = config.resolved_accuracy_reference();

  struct Sample {
    int bin;
    bool correct;
  };
  std::vector<std::optional<std::vector<Sample>>> outcomes(records.size());

  parallel_for(records.size(), config.workers, [&](std::size_t i) {
    const ImageRecord& record = records[i];
    const PartImportance* pi =
        find_importance(importances, record, config, label);
    if (!pi) return;
    const ClassId expected = reference == AccuracyReference::kOriginalPrediction
                                 ? predicted_class(record.original())
                                 : record.ground_truth_label;
    const std::vector<PartId> order = removal_order(*pi, direction);
    const std::vector<PartSubset> prefixes = required_prefix_subsets(order);
    std::vector<Sample> samples;
    for (std::size_t k = 0; k < prefixes.size(); ++k) {
      const LogitRecord* variant =
          find_required(record, prefixes[k], config, label);
      if (!variant) return;
      samples.push_back({level_bin(k + 1, prefixes.size()),
                         predicted_class(*variant) == expected});
    }
    outcomes[i] = std::move(samples);
  });

  MetricResult result = start_result(id, importances, config);
  std::array<std::size_t, 10> correct{};
  std::array<std::size_t, 10> total{};
  for (std::size_t i : reduction_order(records)) {
    if (!outcomes[i]) {
      ++result.n_skipped;
      continue;
    }
    ++result.n_evaluated;
    for (const Sample& s : *outcomes[i]) {
      ++total[s.bin];
      correct[s.bin] += s.correct;
    }
  }
  double sum = 0.0;
  std::size_t bins = 0;
  for (int b = 1; b <= 9; ++b) {
    if (total[b] == 0) continue;
    sum += static_cast<double>(correct[b]) / static_cast<double>(total[b]);
    ++bins;
    result.per_level.push_back(
        {b / 10.0, percent(correct[b], total[b]), total[b]});
  }
  if (bins > 0) result.value = 100.0 * (sum / static_cast<double>(bins));
  return result;
}

std::vector<MetricResult> evaluate_method(std::span<const ImageRecord> records,
                                          const std::string& method_id,
                                          const EvaluationConfig& config) {
  config.validate();
  const AttributionKey key{method_id, config.class_mode};
  const ImportanceTable threshold_table =
      compute_importances(records, key, config.aggregation);
  const ImportanceTable mean_table =
      config.aggregation == Aggregation::kMeanPerPart
          ? threshold_table
          : compute_importances(records, key, Aggregation::kMeanPerPart);

  std::vector<MetricResult> results;
  results.push_back(single_deletion(records, threshold_table, config));
  results.push_back(
      preservation_check(records, threshold_table, config.thresholds, config));
  results.push_back(
      deletion_check(records, threshold_table, config.thresholds, config));
  results.push_back(
      perturbation_curve(records, mean_table, Direction::kMostFirst, config));
  results.push_back(
      perturbation_curve(records, mean_table, Direction::kLeastFirst, config));
  for (MetricResult& r : results) {
    r.method_id = method_id;
    r.class_mode = config.class_mode;
  }
  return results;
}

}  // namespace parteval
