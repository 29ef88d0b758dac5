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

#include "parteval/planner.hpp"

#include <algorithm>

namespace parteval {

std::vector<PartSubset> enumerate_plan(std::span<const PartId> parts,
                                       std::size_t budget) {
  std::vector<PartId> sorted(parts.begin(), parts.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) throw PlanError("cannot plan an image without parts");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw PlanError("duplicate part ids");
  }
  const std::size_t p = sorted.size();
  if (budget < p) {
    throw PlanError("budget " + std::to_string(budget) + " is below the " +
                    std::to_string(p) +
                    " single-part deletions the image needs");
  }

  std::vector<PartSubset> plan;
  // Index combinations of each size in lexicographic order; since `sorted` is
  // ascending this is also lexicographic on the member lists.
  for (std::size_t k = 1; k <= p && plan.size() < budget; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (plan.size() < budget) {
      std::vector<PartId> members(k);
      for (std::size_t i = 0; i < k; ++i) members[i] = sorted[idx[i]];
      plan.emplace_back(std::move(members));

      std::size_t i = k;
      while (i > 0 && idx[i - 1] == p - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return plan;
}

PerturbationPlan make_plan(const std::string& image_id,
                           std::span<const PartId> parts, std::size_t budget) {
  return {image_id, enumerate_plan(parts, budget), budget};
}

std::vector<PartSubset> required_prefix_subsets(std::span<const PartId> order) {
  std::vector<PartSubset> out;
  out.reserve(order.size());
  std::vector<PartId> prefix;
  for (PartId part : order) {
    prefix.push_back(part);
    out.emplace_back(prefix);
  }
  return out;
}

}  // namespace parteval
