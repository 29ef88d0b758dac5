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

#ifndef PARTEVAL_FEATURES_HPP_
#define PARTEVAL_FEATURES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parteval/core.hpp"
#include "parteval/otdd.hpp"

namespace parteval {

// Channel-interleaved image, values row by row.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<float> data;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, float fill = 0.0f)
      : height(h), width(w), channels(c), data(h * w * c, fill) {}

  float& at(std::size_t row, std::size_t col, std::size_t ch = 0) {
    return data[(row * width + col) * channels + ch];
  }
  float at(std::size_t row, std::size_t col, std::size_t ch = 0) const {
    return data[(row * width + col) * channels + ch];
  }
};

inline constexpr std::size_t kDefaultFeatureSide = 32;

// Bilinear resampling with half-pixel centres and edge clamping.
Image resize_bilinear(const Image& src, std::size_t out_height,
                      std::size_t out_width);

// Resized to out_height x out_width and flattened (row, col, channel).
std::vector<double> raster_features(const Image& image,
                                    std::size_t out_height = kDefaultFeatureSide,
                                    std::size_t out_width = kDefaultFeatureSide);

// One point per image.  Throws ProtocolError if channel counts differ or the
// label count does not match.
LabeledPointCloud cloud_from_images(const std::string& name,
                                    std::span<const Image> images,
                                    std::span<const ClassId> labels,
                                    std::size_t out_height = kDefaultFeatureSide,
                                    std::size_t out_width = kDefaultFeatureSide);

}  // namespace parteval

#endif  // PARTEVAL_FEATURES_HPP_
