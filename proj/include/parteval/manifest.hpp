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

#ifndef PARTEVAL_MANIFEST_HPP_
#define PARTEVAL_MANIFEST_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parteval/core.hpp"

namespace parteval {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr std::string_view kPlanOrder = "size-then-lexicographic";

// Carries every violation found, not just the first.
class ManifestError : public ProtocolError {
 public:
  ManifestError(std::string source, std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct PlanPolicy {
  std::size_t budget = 0;
  std::string order{kPlanOrder};

  bool operator==(const PlanPolicy&) const = default;
};

// Paths are relative to the manifest's directory unless absolute.
struct ManifestImage {
  std::string image_id;
  ClassId ground_truth_label = 0;
  std::string mask_file;
  std::vector<PartId> part_ids;
  std::vector<PartSubset> plan;
  std::map<PartSubset, std::string> variant_logit_files;
  std::map<AttributionKey, std::string> attribution_files;
  std::optional<std::string> embedding_file;

  bool operator==(const ManifestImage&) const = default;
};

struct Manifest {
  int schema_version = kManifestSchemaVersion;
  std::string dataset_name;
  std::string model_id = "model";
  int class_count = 0;
  std::optional<PlanPolicy> plan_policy;
  std::vector<ManifestImage> images;

  bool operator==(const Manifest&) const = default;
};

// Canonical JSON text (two-space indent, trailing newline).  Serializing the
// same manifest always yields the same bytes.
std::string serialize_manifest(const Manifest& manifest);

// Parses and checks the structural invariants.  Throws ManifestError listing
// every violation.
Manifest parse_manifest(std::string_view text, const std::string& source);

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Structural violations (no file access).
std::vector<std::string> check_manifest(const Manifest& manifest);

// Referenced paths that do not exist, resolved against base_dir.
std::vector<std::string> check_manifest_files(
    const Manifest& manifest, const std::filesystem::path& base_dir);

std::filesystem::path resolve_path(const std::filesystem::path& base_dir,
                                   const std::string& path);

}  // namespace parteval

#endif  // PARTEVAL_MANIFEST_HPP_
