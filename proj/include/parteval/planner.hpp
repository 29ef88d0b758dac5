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

#ifndef PARTEVAL_PLANNER_HPP_
#define PARTEVAL_PLANNER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parteval/core.hpp"

namespace parteval {

inline constexpr std::size_t kDefaultPlanBudget = 32;

// Thrown when a plan cannot cover every single-part deletion.
class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PerturbationPlan {
  std::string image_id;
  // Non-empty subsets to inpaint, fewest parts first.
  std::vector<PartSubset> subsets;
  std::size_t budget = kDefaultPlanBudget;
};

// All non-empty subsets of `parts`, ordered by size and then lexicographically
// on the sorted member lists, truncated to `budget` entries.  Throws PlanError
// when budget < |parts| since single deletion would then be incomplete.
std::vector<PartSubset> enumerate_plan(std::span<const PartId> parts,
                                       std::size_t budget = kDefaultPlanBudget);

PerturbationPlan make_plan(const std::string& image_id,
                           std::span<const PartId> parts,
                           std::size_t budget = kDefaultPlanBudget);

// Cumulative prefixes {o1}, {o1,o2}, ..., {o1..oP} of a removal order.
std::vector<PartSubset> required_prefix_subsets(std::span<const PartId> order);

}  // namespace parteval

#endif  // PARTEVAL_PLANNER_HPP_
