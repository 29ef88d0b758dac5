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

// File formats exchanged with the model adapter.
//
// INGF raster: "INGF" magic, u32 LE height, u32 LE width, then height*width
// IEEE-754 float32 LE values in row-major order.  Nothing else.
//
// Part masks: single-channel 8-bit PNG, 0 = background, k = part k.
//
// Logits: JSON object {"image_id": str, "subset": key, "logits": [numbers]}.

#ifndef PARTEVAL_RASTER_IO_HPP_
#define PARTEVAL_RASTER_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "parteval/core.hpp"

namespace parteval {

inline constexpr char kRasterMagic[4] = {'I', 'N', 'G', 'F'};
inline constexpr std::size_t kRasterHeaderBytes = 12;

std::string encode_raster(const Raster<float>& raster);
// `source` names the input in error messages (usually the path).
Raster<float> decode_raster(std::string_view bytes, const std::string& source);

// Both throw ProtocolError; write refuses non-finite values.
void write_raster(const std::filesystem::path& path, const Raster<float>& raster);
Raster<float> read_raster(const std::filesystem::path& path);

Raster<PartId> read_mask_png(const std::filesystem::path& path);
PartAnnotation read_mask(const std::filesystem::path& path,
                         const std::string& image_id);
// Labels must be in 0..255.
void write_mask_png(const std::filesystem::path& path,
                    const Raster<PartId>& mask);

// class_count 0 skips the length check.
LogitRecord parse_logits(std::string_view json_text, std::size_t class_count,
                         const std::string& source);
LogitRecord read_logits(const std::filesystem::path& path,
                        std::size_t class_count);
void write_logits(const std::filesystem::path& path, const LogitRecord& rec);

// Whole-file helpers shared by the readers and writers.  write_file_atomic
// writes to a sibling temporary and renames it into place.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace parteval

#endif  // PARTEVAL_RASTER_IO_HPP_
