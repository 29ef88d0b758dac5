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

#include "fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unistd.h>

#include "parteval/manifest.hpp"
#include "parteval/planner.hpp"
#include "parteval/raster_io.hpp"

namespace parteval::fixtures {

namespace {

constexpr std::size_t kBlockRows = 3;
constexpr std::size_t kBlockCols = 4;
constexpr double kTrueLogit = 5.0;
constexpr double kRunnerUpLogit = 3.0;
constexpr double kKeyWeight = 3.0;
constexpr double kMinorStep = 0.15;

std::string image_name(std::size_t i) {
  std::string digits = std::to_string(i);
  return "img" + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') +
         digits;
}

// Every subset of `parts`, including the empty one.
std::vector<PartSubset> power_set(const std::vector<PartId>& parts) {
  std::vector<PartSubset> out;
  for (std::uint32_t bits = 0; bits < (1u << parts.size()); ++bits) {
    std::vector<PartId> members;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (bits & (1u << j)) members.push_back(parts[j]);
    }
    out.emplace_back(std::move(members));
  }
  return out;
}

}  // namespace

KeyPartDataset make_key_part_dataset(const KeyPartOptions& options) {
  if (options.classes < 2 || options.min_parts < 1 ||
      options.max_parts < options.min_parts || options.max_parts > 5) {
    throw std::invalid_argument("unsupported key-part options");
  }
  std::mt19937_64 rng(options.seed);
  KeyPartDataset out;
  out.class_count = options.classes;

  for (std::size_t i = 0; i < options.images; ++i) {
    const std::string id = image_name(i);
    const std::size_t parts = std::uniform_int_distribution<std::size_t>(
        options.min_parts, options.max_parts)(rng);
    const ClassId label =
        std::uniform_int_distribution<ClassId>(0, options.classes - 1)(rng);
    const ClassId runner_up = (label + 1) % options.classes;

    Raster<PartId> mask(kBlockRows + 1, kBlockCols * parts, PartId{0});
    for (std::size_t r = 0; r < kBlockRows; ++r) {
      for (std::size_t c = 0; c < mask.width; ++c) {
        mask.at(r, c) = static_cast<PartId>(c / kBlockCols + 1);
      }
    }
    PartAnnotation annotation(id, mask);
    const std::vector<PartId>& ids = annotation.part_ids();

    // Key weight exceeds the logit margin, the minor weights together stay
    // below it, so the prediction flips exactly when the key part goes.
    const PartId key = ids[std::uniform_int_distribution<std::size_t>(
        0, parts - 1)(rng)];
    std::vector<double> minor(parts - 1);
    for (std::size_t j = 0; j < minor.size(); ++j) {
      minor[j] = kMinorStep * static_cast<double>(j + 1);
    }
    std::shuffle(minor.begin(), minor.end(), rng);
    std::map<PartId, double> weight;
    std::size_t next_minor = 0;
    for (PartId p : ids) weight[p] = p == key ? kKeyWeight : minor[next_minor++];

    ImageRecord record{annotation, label, {}, {}};
    for (const PartSubset& subset : power_set(ids)) {
      std::vector<double> logits(options.classes, 0.0);
      logits[runner_up] = kRunnerUpLogit;
      logits[label] = kTrueLogit;
      for (PartId p : subset.parts()) logits[label] -= weight[p];
      record.variants.emplace(subset, LogitRecord(id, subset, logits));
    }

    const double original =
        class_score(record.original(), label, ScoreFn::kSoftmaxProbability);
    Raster<float> perfect(mask.height, mask.width, 0.0f);
    for (std::size_t px = 0; px < mask.values.size(); ++px) {
      const PartId p = mask.values[px];
      if (p == 0) continue;
      const double drop =
          original - class_score(*record.find_variant(PartSubset{p}), label,
                                 ScoreFn::kSoftmaxProbability);
      perfect.values[px] = static_cast<float>(
          drop / static_cast<double>(annotation.pixel_count(p)));
    }
    Raster<float> inverted = perfect;
    for (float& v : inverted.values) v = -v;

    for (ClassMode mode : {ClassMode::kPredicted, ClassMode::kTarget}) {
      record.attributions.emplace(
          AttributionKey{kPerfectMethod, mode},
          AttributionMap{id, kPerfectMethod, mode, perfect});
      record.attributions.emplace(
          AttributionKey{kInvertedMethod, mode},
          AttributionMap{id, kInvertedMethod, mode, inverted});
    }
    out.key_part[id] = key;
    out.records.push_back(std::move(record));
  }
  return out;
}

std::vector<ImageRecord> make_random_dataset(std::mt19937_64& rng,
                                             std::size_t images,
                                             std::size_t max_parts,
                                             int classes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < images; ++i) {
    const std::string id = image_name(i);
    const std::size_t parts =
        std::uniform_int_distribution<std::size_t>(1, max_parts)(rng);
    const std::size_t h =
        std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const std::size_t w =
        std::uniform_int_distribution<std::size_t>(parts, parts + 6)(rng);
    Raster<PartId> mask(h, w, PartId{0});
    std::uniform_int_distribution<PartId> label_of(0, static_cast<PartId>(parts));
    for (PartId& v : mask.values) v = label_of(rng);
    // Guarantee every part id appears at least once.
    std::vector<std::size_t> slots(mask.values.size());
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    for (std::size_t p = 0; p < parts; ++p) {
      mask.values[slots[p]] = static_cast<PartId>(p + 1);
    }
    PartAnnotation annotation(id, mask);

    ImageRecord record{
        annotation,
        std::uniform_int_distribution<ClassId>(0, classes - 1)(rng),
        {},
        {}};
    for (const PartSubset& subset : power_set(annotation.part_ids())) {
      std::vector<double> logits(classes);
      for (double& v : logits) v = normal(rng);
      record.variants.emplace(subset, LogitRecord(id, subset, logits));
    }
    for (ClassMode mode : {ClassMode::kPredicted, ClassMode::kTarget}) {
      Raster<float> values(h, w, 0.0f);
      for (float& v : values.values) v = static_cast<float>(normal(rng));
      record.attributions.emplace(
          AttributionKey{"random", mode},
          AttributionMap{id, "random", mode, std::move(values)});
    }
    out.push_back(std::move(record));
  }
  return out;
}

std::filesystem::path write_dataset(const std::filesystem::path& dir,
                                    std::span<const ImageRecord> records,
                                    int class_count,
                                    const std::string& dataset_name,
                                    bool with_plan) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "masks");
  fs::create_directories(dir / "logits");
  fs::create_directories(dir / "attr");

  Manifest manifest;
  manifest.dataset_name = dataset_name;
  manifest.class_count = class_count;
  if (with_plan) manifest.plan_policy = PlanPolicy{kDefaultPlanBudget};
  for (const ImageRecord& record : records) {
    const std::string& id = record.image_id();
    ManifestImage image;
    image.image_id = id;
    image.ground_truth_label = record.ground_truth_label;
    image.mask_file = "masks/" + id + ".png";
    write_mask_png(dir / image.mask_file, record.annotation.mask());
    image.part_ids = record.annotation.part_ids();
    if (with_plan) image.plan = enumerate_plan(image.part_ids);
    for (const auto& [subset, logits] : record.variants) {
      const std::string file = "logits/" + id + "__" + subset.key() + ".json";
      write_logits(dir / file, logits);
      image.variant_logit_files.emplace(subset, file);
    }
    for (const auto& [key, attr] : record.attributions) {
      const std::string file = "attr/" + id + "__" + key.method_id + "__" +
                               std::string(to_string(key.class_mode)) +
                               ".ingf";
      write_raster(dir / file, attr.values);
      image.attribution_files.emplace(key, file);
    }
    manifest.images.push_back(std::move(image));
  }
  const fs::path path = dir / "manifest.json";
  save_manifest(path, manifest);
  return path;
}

std::filesystem::path scratch_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("parteval_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<PartSubset> brute_force_plan(std::span<const PartId> parts,
                                         std::size_t budget) {
  std::vector<PartId> sorted(parts.begin(), parts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<PartSubset> all = power_set(sorted);
  all.erase(all.begin());  // the empty subset comes first
  std::sort(all.begin(), all.end(),
            [](const PartSubset& a, const PartSubset& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a.parts() < b.parts();
            });
  if (all.size() > budget) all.resize(budget);
  return all;
}

std::optional<double> brute_force_spearman(std::span<const double> x,
                                           std::span<const double> y) {
  const std::size_t n = x.size();
  auto ranks = [n](std::span<const double> v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double less = 0.0;
      double equal = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] < v[i]) less += 1.0;
        if (j != i && v[j] == v[i]) equal += 1.0;
      }
      r[i] = 1.0 + less + equal / 2.0;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace parteval::fixtures
