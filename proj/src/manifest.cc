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

#include "parteval/manifest.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "parteval/raster_io.hpp"

namespace parteval {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_violations(const std::string& source,
                            const std::vector<std::string>& violations) {
  std::string msg = source + ": " + std::to_string(violations.size()) +
                    " manifest violation(s)";
  for (const std::string& v : violations) msg += "\n  - " + v;
  return msg;
}

}  // namespace

ManifestError::ManifestError(std::string source,
                             std::vector<std::string> violations)
    : ProtocolError(join_violations(source, violations)),
      violations_(std::move(violations)) {}

fs::path resolve_path(const fs::path& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

std::string serialize_manifest(const Manifest& m) {
  ordered_json doc;
  doc["schema_version"] = m.schema_version;
  doc["dataset_name"] = m.dataset_name;
  doc["model_id"] = m.model_id;
  doc["class_count"] = m.class_count;
  if (m.plan_policy) {
    doc["plan_policy"] = {{"budget", m.plan_policy->budget},
                          {"order", m.plan_policy->order}};
  }
  doc["images"] = ordered_json::array();
  for (const ManifestImage& img : m.images) {
    ordered_json e;
    e["image_id"] = img.image_id;
    e["ground_truth_label"] = img.ground_truth_label;
    e["mask_file"] = img.mask_file;
    e["part_ids"] = img.part_ids;
    ordered_json plan = ordered_json::array();
    for (const PartSubset& s : img.plan) plan.push_back(s.key());
    e["plan"] = std::move(plan);
    ordered_json variants = ordered_json::object();
    for (const auto& [subset, path] : img.variant_logit_files) {
      variants[subset.key()] = path;
    }
    e["variant_logit_files"] = std::move(variants);
    ordered_json attributions = ordered_json::object();
    for (const auto& [key, path] : img.attribution_files) {
      attributions[key.method_id][std::string(to_string(key.class_mode))] = path;
    }
    e["attribution_files"] = std::move(attributions);
    if (img.embedding_file) e["embedding_file"] = *img.embedding_file;
    doc["images"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

namespace {

// Collects violations while reading fields; never throws on bad content.
class Reader {
 public:
  std::vector<std::string> violations;

  template <typename T>
  std::optional<T> field(const json& obj, const char* name,
                         const std::string& where, bool required = true) {
    const auto it = obj.find(name);
    if (it == obj.end()) {
      if (required) violations.push_back(where + ": missing field '" + name + "'");
      return std::nullopt;
    }
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw std::invalid_argument("not a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw std::invalid_argument("not an integer");
      }
      return it->get<T>();
    } catch (const std::exception&) {
      violations.push_back(where + ": field '" + name + "' has the wrong type");
      return std::nullopt;
    }
  }

  std::optional<PartSubset> subset(const std::string& key,
                                   const std::string& where) {
    try {
      return PartSubset::parse_key(key);
    } catch (const ProtocolError& e) {
      violations.push_back(where + ": " + e.what());
      return std::nullopt;
    }
  }
};

}  // namespace

Manifest parse_manifest(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ManifestError(source, {std::string("invalid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ManifestError(source, {"expected a JSON object"});

  Reader r;
  Manifest m;
  m.schema_version = r.field<int>(doc, "schema_version", "manifest").value_or(0);
  m.dataset_name =
      r.field<std::string>(doc, "dataset_name", "manifest").value_or("");
  m.model_id = r.field<std::string>(doc, "model_id", "manifest", false)
                   .value_or("model");
  m.class_count = r.field<int>(doc, "class_count", "manifest").value_or(0);

  if (const auto it = doc.find("plan_policy"); it != doc.end()) {
    if (!it->is_object()) {
      r.violations.push_back("manifest: 'plan_policy' must be an object");
    } else {
      PlanPolicy policy;
      policy.budget =
          r.field<std::size_t>(*it, "budget", "plan_policy").value_or(0);
      policy.order = r.field<std::string>(*it, "order", "plan_policy")
                         .value_or(std::string(kPlanOrder));
      m.plan_policy = policy;
    }
  }

  const auto images = doc.find("images");
  if (images == doc.end() || !images->is_array()) {
    r.violations.push_back("manifest: missing array field 'images'");
  } else {
    for (std::size_t i = 0; i < images->size(); ++i) {
      const json& e = (*images)[i];
      std::string where = "images[" + std::to_string(i) + "]";
      if (!e.is_object()) {
        r.violations.push_back(where + ": expected an object");
        continue;
      }
      ManifestImage img;
      img.image_id = r.field<std::string>(e, "image_id", where).value_or("");
      if (!img.image_id.empty()) where += " ('" + img.image_id + "')";
      img.ground_truth_label =
          r.field<int>(e, "ground_truth_label", where).value_or(-1);
      img.mask_file = r.field<std::string>(e, "mask_file", where).value_or("");
      img.part_ids = r.field<std::vector<PartId>>(e, "part_ids", where)
                         .value_or(std::vector<PartId>{});
      const auto plan_keys =
          r.field<std::vector<std::string>>(e, "plan", where, false)
              .value_or(std::vector<std::string>{});
      for (const std::string& key : plan_keys) {
        if (auto s = r.subset(key, where + " plan")) img.plan.push_back(*s);
      }
      using VariantFiles = std::map<std::string, std::string>;
      const auto variant_files =
          r.field<VariantFiles>(e, "variant_logit_files", where)
              .value_or(VariantFiles{});
      for (const auto& [key, path] : variant_files) {
        if (auto s = r.subset(key, where + " variant_logit_files")) {
          img.variant_logit_files.emplace(*s, path);
        }
      }
      using AttributionFiles =
          std::map<std::string, std::map<std::string, std::string>>;
      const auto attribution_files =
          r.field<AttributionFiles>(e, "attribution_files", where, false)
              .value_or(AttributionFiles{});
      for (const auto& [method, modes] : attribution_files) {
        for (const auto& [mode, path] : modes) {
          try {
            img.attribution_files.emplace(
                AttributionKey{method, parse_class_mode(mode)}, path);
          } catch (const ProtocolError& ex) {
            r.violations.push_back(where + " attribution_files: " + ex.what());
          }
        }
      }
      img.embedding_file =
          r.field<std::string>(e, "embedding_file", where, false);
      m.images.push_back(std::move(img));
    }
  }

  std::vector<std::string> violations = std::move(r.violations);
  for (std::string& v : check_manifest(m)) violations.push_back(std::move(v));
  if (!violations.empty()) throw ManifestError(source, std::move(violations));
  return m;
}

std::vector<std::string> check_manifest(const Manifest& m) {
  std::vector<std::string> out;
  if (m.schema_version != kManifestSchemaVersion) {
    out.push_back("manifest: unsupported schema_version " +
                  std::to_string(m.schema_version));
  }
  if (m.class_count < 1) out.push_back("manifest: class_count must be >= 1");
  std::set<std::string> seen;
  for (const ManifestImage& img : m.images) {
    const std::string where = "image '" + img.image_id + "'";
    if (img.image_id.empty()) out.push_back("image with empty image_id");
    if (!seen.insert(img.image_id).second) {
      out.push_back(where + ": duplicate image_id");
    }
    if (img.ground_truth_label < 0 || img.ground_truth_label >= m.class_count) {
      out.push_back(where + ": ground_truth_label out of range");
    }
    if (img.mask_file.empty()) out.push_back(where + ": empty mask_file");
    if (img.part_ids.empty()) out.push_back(where + ": no part_ids");
    PartSubset all;
    try {
      all = PartSubset(img.part_ids);
    } catch (const ProtocolError& e) {
      out.push_back(where + ": part_ids: " + e.what());
    }
    std::set<PartSubset> plan_seen;
    for (const PartSubset& s : img.plan) {
      if (s.empty()) out.push_back(where + ": plan contains the empty subset");
      if (!s.is_subset_of(all)) {
        out.push_back(where + ": plan subset '" + s.key() +
                      "' uses unknown parts");
      }
      if (!plan_seen.insert(s).second) {
        out.push_back(where + ": plan repeats subset '" + s.key() + "'");
      }
    }
    for (const auto& [s, path] : img.variant_logit_files) {
      if (!s.is_subset_of(all)) {
        out.push_back(where + ": variant '" + s.key() + "' uses unknown parts");
      }
      if (path.empty()) out.push_back(where + ": empty path for '" + s.key() + "'");
    }
    for (const auto& [key, path] : img.attribution_files) {
      if (path.empty()) {
        out.push_back(where + ": empty attribution path for '" + key.method_id +
                      "'");
      }
    }
    if (img.embedding_file && img.embedding_file->empty()) {
      out.push_back(where + ": empty embedding_file");
    }
  }
  return out;
}

std::vector<std::string> check_manifest_files(const Manifest& m,
                                              const fs::path& base_dir) {
  std::vector<std::string> out;
  auto check = [&](const std::string& where, const std::string& path) {
    if (!fs::exists(resolve_path(base_dir, path))) {
      out.push_back(where + ": file not found: " +
                    resolve_path(base_dir, path).string());
    }
  };
  for (const ManifestImage& img : m.images) {
    const std::string where = "image '" + img.image_id + "'";
    check(where + " mask", img.mask_file);
    for (const auto& [s, path] : img.variant_logit_files) {
      check(where + " variant '" + s.key() + "'", path);
    }
    for (const auto& [key, path] : img.attribution_files) {
      check(where + " attribution '" + key.method_id + "/" +
                std::string(to_string(key.class_mode)) + "'",
            path);
    }
    if (img.embedding_file) check(where + " embedding", *img.embedding_file);
  }
  return out;
}

Manifest load_manifest(const fs::path& path) {
  return parse_manifest(read_file(path), path.string());
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  write_file_atomic(path, serialize_manifest(manifest));
}

}  // namespace parteval
