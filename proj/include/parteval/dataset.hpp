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

#ifndef PARTEVAL_DATASET_HPP_
#define PARTEVAL_DATASET_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "parteval/core.hpp"
#include "parteval/manifest.hpp"
#include "parteval/otdd.hpp"

namespace parteval {

// A manifest with every referenced file loaded and cross-checked.
struct Dataset {
  Manifest manifest;
  std::filesystem::path base_dir;
  std::vector<ImageRecord> images;

  // Distinct (method, class mode) pairs over all images, sorted.
  std::vector<AttributionKey> attribution_keys() const;
};

// Loads masks, logits and attribution rasters.  Either returns a fully
// validated dataset or throws ManifestError listing every violation found.
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     std::size_t workers = 1);

// Point cloud files (JSON):
//   {"name": str, "features": str, "labels": [int], "points": [[number]]}
// or, for raw rasters,
//   {"name": str, "resize": [h, w], "rasters": [{"path": str, "label": int}]}
// where each path is an INGF raster resized bilinearly to h x w.
// A manifest path is also accepted: its images' embedding files (INGF,
// flattened) become the points and ground-truth labels the labels.
LabeledPointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path,
                 const LabeledPointCloud& cloud);

LabeledPointCloud cloud_from_manifest(const Manifest& manifest,
                                      const std::filesystem::path& base_dir);

}  // namespace parteval

#endif  // PARTEVAL_DATASET_HPP_
