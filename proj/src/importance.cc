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

#include "parteval/importance.hpp"

#include <algorithm>
#include <cmath>

namespace parteval {

bool PartImportance::has_negative() const {
  return std::any_of(values.begin(), values.end(),
                     [](const auto& kv) { return kv.second < 0.0; });
}

PartImportance aggregate(const AttributionMap& attr, const PartAnnotation& ann,
                         Aggregation mode) {
  if (attr.values.height != ann.height() || attr.values.width != ann.width()) {
    throw ProtocolError(
        "attribution '" + attr.method_id + "' of image '" + attr.image_id +
        "' is " + std::to_string(attr.values.height) + "x" +
        std::to_string(attr.values.width) + " but its mask is " +
        std::to_string(ann.height()) + "x" + std::to_string(ann.width()));
  }
  if (attr.image_id != ann.image_id()) {
    throw ProtocolError("attribution for image '" + attr.image_id +
                        "' paired with mask of '" + ann.image_id() + "'");
  }

  PartImportance pi{attr.image_id, attr.method_id, attr.class_mode, mode, {}};
  for (PartId part : ann.part_ids()) pi.values[part] = 0.0;

  const auto& labels = ann.mask().values;
  const auto& scores = attr.values.values;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0) pi.values[labels[i]] += static_cast<double>(scores[i]);
  }
  if (mode == Aggregation::kMeanPerPart) {
    for (auto& [part, value] : pi.values) {
      value /= static_cast<double>(ann.pixel_count(part));
    }
  }
  return pi;
}

std::vector<PartId> removal_order(const PartImportance& pi,
                                  Direction direction) {
  std::vector<std::pair<PartId, double>> entries(pi.values.begin(),
                                                 pi.values.end());
  // `entries` is already ascending by part id, so a stable sort on the value
  // alone gives the id tie-break.
  if (direction == Direction::kLeastFirst) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) {
                       return a.second < b.second;
                     });
  } else {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) {
                       return a.second > b.second;
                     });
  }
  std::vector<PartId> order;
  order.reserve(entries.size());
  for (const auto& [part, value] : entries) order.push_back(part);
  return order;
}

PartSubset select_threshold_subset(const PartImportance& pi, double t,
                                   Direction direction) {
  const std::vector<PartId> order = removal_order(pi, direction);
  if (order.empty()) return PartSubset();

  double total = 0.0;
  for (PartId part : order) total += std::max(pi.values.at(part), 0.0);
  if (!(total > 0.0)) return PartSubset({order.front()});

  std::vector<PartId> chosen;
  double cumulative = 0.0;
  for (PartId part : order) {
    chosen.push_back(part);
    cumulative += std::max(pi.values.at(part), 0.0);
    if (cumulative / total >= t) break;
  }
  return PartSubset(std::move(chosen));
}

}  // namespace parteval
