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

#ifndef PARTEVAL_IMPORTANCE_HPP_
#define PARTEVAL_IMPORTANCE_HPP_

#include <map>
#include <string>
#include <vector>

#include "parteval/core.hpp"

namespace parteval {

enum class Direction { kLeastFirst, kMostFirst };

struct PartImportance {
  std::string image_id;
  std::string method_id;
  ClassMode class_mode = ClassMode::kPredicted;
  Aggregation aggregation = Aggregation::kSumPerPart;
  std::map<PartId, double> values;

  // True when at least one importance is negative, i.e. threshold selection
  // works on clamped values for this image.
  bool has_negative() const;
};

// Per-part sum (or mean) of the attribution over the part's pixels.
// Throws ProtocolError on a dimension or image id mismatch.
PartImportance aggregate(const AttributionMap& attr, const PartAnnotation& ann,
                         Aggregation mode);

// Parts by importance; ties go to the lower part id in both directions.
std::vector<PartId> removal_order(const PartImportance& pi,
                                  Direction direction);

// Shortest prefix of removal_order(pi, direction) whose share of the clamped
// importance mass max(v, 0) reaches t.  When no part has positive importance
// the first part of the order is returned alone.
PartSubset select_threshold_subset(const PartImportance& pi, double t,
                                   Direction direction);

}  // namespace parteval

#endif  // PARTEVAL_IMPORTANCE_HPP_
