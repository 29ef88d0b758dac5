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

// Synthetic datasets and brute-force oracles shared by the test suites.

#ifndef PARTEVAL_TESTS_FIXTURE_HPP_
#define PARTEVAL_TESTS_FIXTURE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "parteval/core.hpp"

namespace parteval::fixtures {

inline constexpr char kPerfectMethod[] = "perfect";
inline constexpr char kInvertedMethod[] = "inverted";

struct KeyPartOptions {
  std::size_t images = 20;
  std::size_t min_parts = 3;
  std::size_t max_parts = 5;
  int classes = 3;
  std::uint64_t seed = 7;
};

struct KeyPartDataset {
  std::vector<ImageRecord> records;
  std::map<std::string, PartId> key_part;
  int class_count = 0;
};

// Every image has parts laid out as equal-area column blocks.  The classifier
// is a lookup table over all part subsets built so that the prediction flips
// iff the image's key part is removed; every part's removal lowers the
// true-class logit by a distinct amount.  Two attribution maps are attached
// per class mode: "perfect", whose per-part sums equal the true softmax drops
// under single-part removal, and "inverted", its negation.
KeyPartDataset make_key_part_dataset(const KeyPartOptions& options);

// Random logits for every part subset and random signed attributions under
// method "random" (both class modes).  Part counts in 1..max_parts.
std::vector<ImageRecord> make_random_dataset(std::mt19937_64& rng,
                                             std::size_t images,
                                             std::size_t max_parts,
                                             int classes);

// Writes masks, logits, attribution rasters and a manifest under `dir`.
// Returns the manifest path.  With `with_plan`, plans use the default budget.
std::filesystem::path write_dataset(const std::filesystem::path& dir,
                                    std::span<const ImageRecord> records,
                                    int class_count,
                                    const std::string& dataset_name,
                                    bool with_plan);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// All non-empty subsets via bitmasks, sorted by (size, members), truncated.
std::vector<PartSubset> brute_force_plan(std::span<const PartId> parts,
                                         std::size_t budget);

// Ranks by counting (rank = 1 + #less + #equal-others / 2), then Pearson.
std::optional<double> brute_force_spearman(std::span<const double> x,
                                           std::span<const double> y);

}  // namespace parteval::fixtures

#endif  // PARTEVAL_TESTS_FIXTURE_HPP_
