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

#include "parteval/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace parteval {

std::string_view to_string(ClassMode mode) {
  return mode == ClassMode::kPredicted ? "predicted" : "target";
}

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kSumPerPart ? "sum" : "mean";
}

std::string_view to_string(ScoreFn fn) {
  return fn == ScoreFn::kSoftmaxProbability ? "softmax" : "logit";
}

std::string_view to_string(AccuracyReference ref) {
  return ref == AccuracyReference::kOriginalPrediction ? "original_prediction"
                                                       : "ground_truth";
}

std::string_view to_string(CoveragePolicy policy) {
  return policy == CoveragePolicy::kSkipMissing ? "skip" : "fail";
}

namespace {

[[noreturn]] void unknown(std::string_view what, std::string_view name) {
  throw ProtocolError("unknown " + std::string(what) + " '" +
                      std::string(name) + "'");
}

}  // namespace

ClassMode parse_class_mode(std::string_view name) {
  if (name == "predicted") return ClassMode::kPredicted;
  if (name == "target") return ClassMode::kTarget;
  unknown("class mode", name);
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "sum") return Aggregation::kSumPerPart;
  if (name == "mean") return Aggregation::kMeanPerPart;
  unknown("aggregation", name);
}

ScoreFn parse_score_fn(std::string_view name) {
  if (name == "softmax") return ScoreFn::kSoftmaxProbability;
  if (name == "logit") return ScoreFn::kRawLogit;
  unknown("score function", name);
}

AccuracyReference parse_accuracy_reference(std::string_view name) {
  if (name == "original_prediction") {
    return AccuracyReference::kOriginalPrediction;
  }
  if (name == "ground_truth") return AccuracyReference::kGroundTruth;
  unknown("accuracy reference", name);
}

CoveragePolicy parse_coverage_policy(std::string_view name) {
  if (name == "skip") return CoveragePolicy::kSkipMissing;
  if (name == "fail") return CoveragePolicy::kFailMissing;
  unknown("coverage policy", name);
}

// PartSubset

PartSubset::PartSubset(std::vector<PartId> parts) : parts_(std::move(parts)) {
  std::sort(parts_.begin(), parts_.end());
  if (std::adjacent_find(parts_.begin(), parts_.end()) != parts_.end()) {
    throw ProtocolError("part subset contains duplicate ids");
  }
  if (!parts_.empty() && parts_.front() <= 0) {
    throw ProtocolError("part ids must be positive");
  }
}

std::string PartSubset::key() const {
  if (parts_.empty()) return "orig";
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(parts_[i]);
  }
  return out;
}

PartSubset PartSubset::parse_key(std::string_view key) {
  if (key == "orig") return PartSubset();
  if (key.empty()) throw ProtocolError("empty subset key");
  std::vector<PartId> parts;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const std::size_t dash = std::min(key.find('-', pos), key.size());
    const std::string_view token = key.substr(pos, dash - pos);
    PartId value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() ||
        ptr != token.data() + token.size()) {
      throw ProtocolError("malformed subset key '" + std::string(key) + "'");
    }
    parts.push_back(value);
    pos = dash + 1;
  }
  PartSubset subset(std::move(parts));
  // Keys are canonical: reject "3-1" so that every subset has one spelling.
  if (subset.key() != key) {
    throw ProtocolError("subset key '" + std::string(key) +
                        "' is not in canonical sorted form");
  }
  return subset;
}

bool PartSubset::contains(PartId part) const {
  return std::binary_search(parts_.begin(), parts_.end(), part);
}

bool PartSubset::is_subset_of(const PartSubset& other) const {
  return std::includes(other.parts_.begin(), other.parts_.end(),
                       parts_.begin(), parts_.end());
}

// PartAnnotation

PartAnnotation::PartAnnotation(std::string image_id, Raster<PartId> mask)
    : image_id_(std::move(image_id)), mask_(std::move(mask)) {
  for (PartId v : mask_.values) {
    if (v < 0) {
      throw ProtocolError("mask of image '" + image_id_ +
                          "' contains a negative label");
    }
    if (v != 0) ++pixel_counts_[v];
  }
  if (pixel_counts_.empty()) {
    throw ProtocolError("mask of image '" + image_id_ +
                        "': no parts present");
  }
  for (const auto& [part, count] : pixel_counts_) part_ids_.push_back(part);
}

PartAnnotation::PartAnnotation(std::string image_id, Raster<PartId> mask,
                               std::vector<PartId> part_ids)
    : PartAnnotation(std::move(image_id), std::move(mask)) {
  std::sort(part_ids.begin(), part_ids.end());
  if (part_ids != part_ids_) {
    throw ProtocolError("mask of image '" + image_id_ +
                        "' does not match the declared part ids");
  }
}

std::size_t PartAnnotation::pixel_count(PartId part) const {
  const auto it = pixel_counts_.find(part);
  return it == pixel_counts_.end() ? 0 : it->second;
}

// LogitRecord

LogitRecord::LogitRecord(std::string image_id, PartSubset variant,
                         std::vector<double> logits)
    : image_id_(std::move(image_id)),
      variant_(std::move(variant)),
      logits_(std::move(logits)) {
  if (logits_.empty()) {
    throw ProtocolError("logits of image '" + image_id_ + "' variant '" +
                        variant_.key() + "' are empty");
  }
  for (double v : logits_) {
    if (!std::isfinite(v)) {
      throw ProtocolError("logits of image '" + image_id_ + "' variant '" +
                          variant_.key() + "' contain a non-finite value");
    }
  }
}

// ImageRecord

const LogitRecord& ImageRecord::original() const {
  const auto it = variants.find(PartSubset());
  if (it == variants.end()) {
    throw ProtocolError("image '" + image_id() + "' has no original logits");
  }
  return it->second;
}

const LogitRecord* ImageRecord::find_variant(const PartSubset& subset) const {
  const auto it = variants.find(subset);
  return it == variants.end() ? nullptr : &it->second;
}

const AttributionMap* ImageRecord::find_attribution(
    const AttributionKey& key) const {
  const auto it = attributions.find(key);
  return it == attributions.end() ? nullptr : &it->second;
}

std::vector<std::string> validate(const ImageRecord& record) {
  std::vector<std::string> errors;
  const std::string& id = record.image_id();
  if (!record.variants.contains(PartSubset())) {
    errors.push_back("image '" + id + "': original variant missing");
  }
  const PartSubset all(record.annotation.part_ids());
  std::optional<std::size_t> classes;
  for (const auto& [subset, logits] : record.variants) {
    if (!subset.is_subset_of(all)) {
      errors.push_back("image '" + id + "': variant '" + subset.key() +
                       "' removes parts not in the annotation");
    }
    if (logits.variant() != subset || logits.image_id() != id) {
      errors.push_back("image '" + id + "': variant '" + subset.key() +
                       "' holds logits for a different image or subset");
    }
    if (classes && *classes != logits.num_classes()) {
      errors.push_back("image '" + id + "': variant '" + subset.key() +
                       "' has an inconsistent class count");
    }
    classes = logits.num_classes();
  }
  if (record.ground_truth_label < 0 ||
      (classes && static_cast<std::size_t>(record.ground_truth_label) >=
                      *classes)) {
    errors.push_back("image '" + id + "': ground truth label out of range");
  }
  for (const auto& [key, attr] : record.attributions) {
    const std::string where = "image '" + id + "' attribution '" +
                              key.method_id + "/" +
                              std::string(to_string(key.class_mode)) + "'";
    if (attr.values.height != record.annotation.height() ||
        attr.values.width != record.annotation.width()) {
      errors.push_back(where + ": dimensions differ from the mask");
    }
    if (std::any_of(attr.values.values.begin(), attr.values.values.end(),
                    [](float v) { return !std::isfinite(v); })) {
      errors.push_back(where + ": non-finite value");
    }
  }
  return errors;
}

// EvaluationConfig

AccuracyReference EvaluationConfig::resolved_accuracy_reference() const {
  if (accuracy_reference) return *accuracy_reference;
  return class_mode == ClassMode::kPredicted
             ? AccuracyReference::kOriginalPrediction
             : AccuracyReference::kGroundTruth;
}

void EvaluationConfig::validate() const {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const double t = thresholds[i];
    if (!(t > 0.0 && t < 1.0)) {
      throw ProtocolError("threshold " + std::to_string(t) +
                          " is outside (0, 1)");
    }
    if (i > 0 && !(thresholds[i - 1] < t)) {
      throw ProtocolError("thresholds must be strictly increasing");
    }
  }
  if (workers == 0) throw ProtocolError("worker count must be positive");
}

// Scores

ClassId predicted_class(std::span<const double> logits) {
  if (logits.empty()) throw ProtocolError("cannot take argmax of no logits");
  // max_element returns the first maximum, which is the lowest index.
  return static_cast<ClassId>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
}

ClassId predicted_class(const LogitRecord& rec) {
  return predicted_class(std::span<const double>(rec.logits()));
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double class_score(const LogitRecord& rec, ClassId cls, ScoreFn fn) {
  if (cls < 0 || static_cast<std::size_t>(cls) >= rec.num_classes()) {
    throw ProtocolError("class " + std::to_string(cls) +
                        " out of range for image '" + rec.image_id() + "'");
  }
  if (fn == ScoreFn::kRawLogit) return rec.logits()[cls];
  const auto& logits = rec.logits();
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - peak);
  return std::exp(logits[cls] - peak) / total;
}

}  // namespace parteval
