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

#include "parteval/dataset.hpp"

#include <set>

#include "json.hpp"
#include "parteval/features.hpp"
#include "parteval/parallel.hpp"
#include "parteval/raster_io.hpp"

namespace parteval {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<AttributionKey> Dataset::attribution_keys() const {
  std::set<AttributionKey> keys;
  for (const ImageRecord& img : images) {
    for (const auto& [key, attr] : img.attributions) keys.insert(key);
  }
  return {keys.begin(), keys.end()};
}

namespace {

// Loads one image; appends problems to `violations` instead of throwing.
std::optional<ImageRecord> load_image(const Manifest& m,
                                      const ManifestImage& entry,
                                      const fs::path& base_dir,
                                      std::vector<std::string>& violations) {
  const std::string where = "image '" + entry.image_id + "'";
  std::optional<PartAnnotation> annotation;
  try {
    Raster<PartId> mask = read_mask_png(resolve_path(base_dir, entry.mask_file));
    annotation.emplace(entry.image_id, std::move(mask), entry.part_ids);
  } catch (const ProtocolError& e) {
    violations.push_back(where + ": " + e.what());
  }

  std::map<PartSubset, LogitRecord> variants;
  for (const auto& [subset, path] : entry.variant_logit_files) {
    try {
      LogitRecord rec = read_logits(resolve_path(base_dir, path),
                                    static_cast<std::size_t>(m.class_count));
      if (rec.image_id() != entry.image_id || rec.variant() != subset) {
        violations.push_back(where + ": " + path + " holds image '" +
                             rec.image_id() + "' subset '" +
                             rec.variant().key() + "', expected '" +
                             subset.key() + "'");
        continue;
      }
      variants.emplace(subset, std::move(rec));
    } catch (const ProtocolError& e) {
      violations.push_back(where + ": " + e.what());
    }
  }
  if (!entry.variant_logit_files.contains(PartSubset())) {
    violations.push_back(where + ": no logits for the original image ('orig')");
  }

  std::map<AttributionKey, AttributionMap> attributions;
  for (const auto& [key, path] : entry.attribution_files) {
    try {
      Raster<float> values = read_raster(resolve_path(base_dir, path));
      if (annotation && (values.height != annotation->height() ||
                         values.width != annotation->width())) {
        violations.push_back(
            where + ": attribution " + path + " is " +
            std::to_string(values.height) + "x" + std::to_string(values.width) +
            " but the mask is " + std::to_string(annotation->height()) + "x" +
            std::to_string(annotation->width()));
        continue;
      }
      attributions.emplace(key, AttributionMap{entry.image_id, key.method_id,
                                               key.class_mode,
                                               std::move(values)});
    } catch (const ProtocolError& e) {
      violations.push_back(where + ": " + e.what());
    }
  }

  if (!annotation) return std::nullopt;
  return ImageRecord{std::move(*annotation), entry.ground_truth_label,
                     std::move(variants), std::move(attributions)};
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path, std::size_t workers) {
  Manifest manifest = load_manifest(manifest_path);
  const fs::path base_dir = manifest_path.parent_path();

  std::vector<std::string> violations = check_manifest_files(manifest, base_dir);
  if (!violations.empty()) {
    throw ManifestError(manifest_path.string(), std::move(violations));
  }

  const std::size_t n = manifest.images.size();
  std::vector<std::optional<ImageRecord>> loaded(n);
  std::vector<std::vector<std::string>> per_image(n);
  parallel_for(n, workers, [&](std::size_t i) {
    loaded[i] = load_image(manifest, manifest.images[i], base_dir, per_image[i]);
  });

  Dataset dataset{std::move(manifest), base_dir, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::string& v : per_image[i]) violations.push_back(std::move(v));
    if (loaded[i] && per_image[i].empty()) {
      for (std::string& v : validate(*loaded[i])) violations.push_back(std::move(v));
      dataset.images.push_back(std::move(*loaded[i]));
    }
  }
  if (!violations.empty()) {
    throw ManifestError(manifest_path.string(), std::move(violations));
  }
  return dataset;
}

// Point clouds

LabeledPointCloud cloud_from_manifest(const Manifest& manifest,
                                      const fs::path& base_dir) {
  std::vector<std::vector<double>> rows;
  LabeledPointCloud cloud;
  cloud.name = manifest.dataset_name;
  cloud.features = "embedding";
  for (const ManifestImage& img : manifest.images) {
    if (!img.embedding_file) continue;
    const Raster<float> r = read_raster(resolve_path(base_dir, *img.embedding_file));
    if (!rows.empty() && rows.front().size() != r.values.size()) {
      throw ProtocolError("embedding of image '" + img.image_id + "' has " +
                          std::to_string(r.values.size()) +
                          " values, expected " +
                          std::to_string(rows.front().size()));
    }
    rows.emplace_back(r.values.begin(), r.values.end());
    cloud.labels.push_back(img.ground_truth_label);
  }
  if (rows.empty()) {
    throw ProtocolError("manifest '" + manifest.dataset_name +
                        "' has no embedding files");
  }
  cloud.points.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      cloud.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  cloud.validate();
  return cloud;
}

LabeledPointCloud read_cloud(const fs::path& path) {
  const std::string source = path.string();
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ProtocolError(source + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ProtocolError(source + ": expected a JSON object");
  if (doc.contains("schema_version")) {
    return cloud_from_manifest(load_manifest(path), path.parent_path());
  }

  try {
    LabeledPointCloud cloud;
    cloud.name = doc.value("name", path.stem().string());
    if (doc.contains("rasters")) {
      const auto resize = doc.at("resize").get<std::vector<std::size_t>>();
      if (resize.size() != 2 || resize[0] == 0 || resize[1] == 0) {
        throw ProtocolError(source + ": 'resize' must be [height, width]");
      }
      std::vector<Image> images;
      std::vector<ClassId> labels;
      for (const json& entry : doc.at("rasters")) {
        const Raster<float> r = read_raster(
            resolve_path(path.parent_path(), entry.at("path").get<std::string>()));
        Image img(r.height, r.width, 1);
        img.data = r.values;
        images.push_back(std::move(img));
        labels.push_back(entry.at("label").get<ClassId>());
      }
      cloud = cloud_from_images(cloud.name, images, labels, resize[0], resize[1]);
    } else {
      cloud.features = doc.value("features", "embedding");
      const auto points = doc.at("points").get<std::vector<std::vector<double>>>();
      cloud.labels = doc.at("labels").get<std::vector<ClassId>>();
      if (points.empty()) throw ProtocolError(source + ": no points");
      cloud.points.resize(static_cast<Eigen::Index>(points.size()),
                          static_cast<Eigen::Index>(points.front().size()));
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != points.front().size()) {
          throw ProtocolError(source + ": point " + std::to_string(i) +
                              " has dimension " +
                              std::to_string(points[i].size()) + ", expected " +
                              std::to_string(points.front().size()));
        }
        for (std::size_t j = 0; j < points[i].size(); ++j) {
          cloud.points(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j)) = points[i][j];
        }
      }
    }
    cloud.validate();
    return cloud;
  } catch (const json::exception& e) {
    throw ProtocolError(source + ": malformed point cloud: " + e.what());
  } catch (const ProtocolError& e) {
    const std::string what = e.what();
    if (what.rfind(source, 0) == 0) throw;
    throw ProtocolError(source + ": " + what);
  }
}

void write_cloud(const fs::path& path, const LabeledPointCloud& cloud) {
  nlohmann::ordered_json doc;
  doc["name"] = cloud.name;
  doc["features"] = cloud.features;
  doc["labels"] = cloud.labels;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < cloud.points.rows(); ++i) {
    std::vector<double> row(cloud.points.cols());
    for (Eigen::Index j = 0; j < cloud.points.cols(); ++j) row[j] = cloud.points(i, j);
    points.push_back(std::move(row));
  }
  doc["points"] = std::move(points);
  write_file_atomic(path, doc.dump() + "\n");
}

}  // namespace parteval
