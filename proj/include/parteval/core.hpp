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

// Domain types shared by the planner, importance, metrics and protocol code.
//
// Nothing in here owns image pixels: part masks, attribution rasters and
// classifier logits are all the evaluation needs.

#ifndef PARTEVAL_CORE_HPP_
#define PARTEVAL_CORE_HPP_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parteval {

using PartId = int;
using ClassId = int;

// Raised for malformed inputs: bad files, dimension mismatches, out of range
// class ids.  The message always carries enough context to find the culprit.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ClassMode { kPredicted, kTarget };
enum class Aggregation { kSumPerPart, kMeanPerPart };
enum class ScoreFn { kSoftmaxProbability, kRawLogit };
enum class AccuracyReference { kOriginalPrediction, kGroundTruth };
enum class CoveragePolicy { kSkipMissing, kFailMissing };

std::string_view to_string(ClassMode mode);
std::string_view to_string(Aggregation aggregation);
std::string_view to_string(ScoreFn fn);
std::string_view to_string(AccuracyReference ref);
std::string_view to_string(CoveragePolicy policy);

// Inverse of to_string; throws ProtocolError on unknown names.
ClassMode parse_class_mode(std::string_view name);
Aggregation parse_aggregation(std::string_view name);
ScoreFn parse_score_fn(std::string_view name);
AccuracyReference parse_accuracy_reference(std::string_view name);
CoveragePolicy parse_coverage_policy(std::string_view name);

// Row-major 2-D raster.
template <typename T>
struct Raster {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<T> values;

  Raster() = default;
  Raster(std::size_t h, std::size_t w, T fill = T{})
      : height(h), width(w), values(h * w, fill) {}
  Raster(std::size_t h, std::size_t w, std::vector<T> v)
      : height(h), width(w), values(std::move(v)) {
    if (values.size() != h * w) {
      throw ProtocolError("raster payload size does not match " +
                          std::to_string(h) + "x" + std::to_string(w));
    }
  }

  T& at(std::size_t row, std::size_t col) { return values[row * width + col]; }
  const T& at(std::size_t row, std::size_t col) const {
    return values[row * width + col];
  }

  bool operator==(const Raster&) const = default;
};

// A set of part ids, kept sorted and duplicate free.  The empty subset is the
// original (unperturbed) image.
class PartSubset {
 public:
  PartSubset() = default;
  // Sorts and checks for duplicates and non-positive ids.
  explicit PartSubset(std::vector<PartId> parts);
  PartSubset(std::initializer_list<PartId> parts)
      : PartSubset(std::vector<PartId>(parts)) {}

  // "orig" for the empty subset, otherwise sorted ids joined with '-'.
  std::string key() const;
  static PartSubset parse_key(std::string_view key);

  const std::vector<PartId>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  bool contains(PartId part) const;
  bool is_subset_of(const PartSubset& other) const;

  auto operator<=>(const PartSubset&) const = default;

 private:
  std::vector<PartId> parts_;
};

class PartAnnotation {
 public:
  // part_ids are derived from the mask: the sorted distinct non-zero labels.
  // Throws ProtocolError when the mask contains no parts.
  PartAnnotation(std::string image_id, Raster<PartId> mask);

  // Validates that the mask uses exactly the given part ids.
  PartAnnotation(std::string image_id, Raster<PartId> mask,
                 std::vector<PartId> part_ids);

  const std::string& image_id() const { return image_id_; }
  std::size_t height() const { return mask_.height; }
  std::size_t width() const { return mask_.width; }
  const std::vector<PartId>& part_ids() const { return part_ids_; }
  std::size_t part_count() const { return part_ids_.size(); }
  const Raster<PartId>& mask() const { return mask_; }
  // Pixel count of a part; 0 for unknown ids.
  std::size_t pixel_count(PartId part) const;

 private:
  std::string image_id_;
  Raster<PartId> mask_;
  std::vector<PartId> part_ids_;
  std::map<PartId, std::size_t> pixel_counts_;
};

struct AttributionKey {
  std::string method_id;
  ClassMode class_mode = ClassMode::kPredicted;

  auto operator<=>(const AttributionKey&) const = default;
};

struct AttributionMap {
  std::string image_id;
  std::string method_id;
  ClassMode class_mode = ClassMode::kPredicted;
  Raster<float> values;
};

class LogitRecord {
 public:
  // Throws ProtocolError on empty or non-finite logits.
  LogitRecord(std::string image_id, PartSubset variant,
              std::vector<double> logits);

  const std::string& image_id() const { return image_id_; }
  const PartSubset& variant() const { return variant_; }
  const std::vector<double>& logits() const { return logits_; }
  std::size_t num_classes() const { return logits_.size(); }

 private:
  std::string image_id_;
  PartSubset variant_;
  std::vector<double> logits_;
};

struct ImageRecord {
  PartAnnotation annotation;
  ClassId ground_truth_label = 0;
  std::map<PartSubset, LogitRecord> variants;
  std::map<AttributionKey, AttributionMap> attributions;

  const std::string& image_id() const { return annotation.image_id(); }
  // Logits on the unperturbed image.
  const LogitRecord& original() const;
  const LogitRecord* find_variant(const PartSubset& subset) const;
  const AttributionMap* find_attribution(const AttributionKey& key) const;
};

// Checks the ImageRecord invariants (original variant present, variant subsets
// drawn from the annotation's parts, attribution rasters matching the mask).
// Returns every violation found; empty means valid.
std::vector<std::string> validate(const ImageRecord& record);

struct EvaluationConfig {
  std::vector<double> thresholds{0.2, 0.4, 0.6, 0.8};
  Aggregation aggregation = Aggregation::kSumPerPart;
  ClassMode class_mode = ClassMode::kPredicted;
  ScoreFn score_fn = ScoreFn::kSoftmaxProbability;
  // Unset means "follow the class mode": original prediction for Predicted,
  // ground truth for Target.
  std::optional<AccuracyReference> accuracy_reference;
  CoveragePolicy coverage_policy = CoveragePolicy::kSkipMissing;
  std::size_t workers = 1;

  AccuracyReference resolved_accuracy_reference() const;
  // Throws ProtocolError unless thresholds are strictly increasing in (0,1).
  void validate() const;
};

// Index of the largest logit, lowest index on ties.
ClassId predicted_class(const LogitRecord& rec);
ClassId predicted_class(std::span<const double> logits);

// Numerically stable softmax (max-subtracted).
std::vector<double> softmax(std::span<const double> logits);

double class_score(const LogitRecord& rec, ClassId cls, ScoreFn fn);

}  // namespace parteval

#endif  // PARTEVAL_CORE_HPP_
