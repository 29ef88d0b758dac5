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

#include "parteval/features.hpp"

#include <algorithm>
#include <cmath>

namespace parteval {

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double weight_hi;
};

Tap source_tap(std::size_t dst, std::size_t dst_size, std::size_t src_size) {
  const double scale =
      static_cast<double>(src_size) / static_cast<double>(dst_size);
  const double pos = std::clamp((static_cast<double>(dst) + 0.5) * scale - 0.5,
                                0.0, static_cast<double>(src_size - 1));
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, src_size - 1);
  return {lo, hi, pos - static_cast<double>(lo)};
}

}  // namespace

Image resize_bilinear(const Image& src, std::size_t out_height,
                      std::size_t out_width) {
  if (src.height == 0 || src.width == 0 || out_height == 0 || out_width == 0) {
    throw ProtocolError("cannot resize an empty image");
  }
  Image out(out_height, out_width, src.channels);
  for (std::size_t r = 0; r < out_height; ++r) {
    const Tap ty = source_tap(r, out_height, src.height);
    for (std::size_t c = 0; c < out_width; ++c) {
      const Tap tx = source_tap(c, out_width, src.width);
      for (std::size_t ch = 0; ch < src.channels; ++ch) {
        const double top = (1.0 - tx.weight_hi) * src.at(ty.lo, tx.lo, ch) +
                           tx.weight_hi * src.at(ty.lo, tx.hi, ch);
        const double bottom = (1.0 - tx.weight_hi) * src.at(ty.hi, tx.lo, ch) +
                              tx.weight_hi * src.at(ty.hi, tx.hi, ch);
        out.at(r, c, ch) = static_cast<float>((1.0 - ty.weight_hi) * top +
                                              ty.weight_hi * bottom);
      }
    }
  }
  return out;
}

std::vector<double> raster_features(const Image& image,
                                    std::size_t out_height,
                                    std::size_t out_width) {
  const Image small = resize_bilinear(image, out_height, out_width);
  return {small.data.begin(), small.data.end()};
}

LabeledPointCloud cloud_from_images(const std::string& name,
                                    std::span<const Image> images,
                                    std::span<const ClassId> labels,
                                    std::size_t out_height,
                                    std::size_t out_width) {
  if (images.size() != labels.size()) {
    throw ProtocolError("cloud '" + name + "': " +
                        std::to_string(images.size()) + " images but " +
                        std::to_string(labels.size()) + " labels");
  }
  if (images.empty()) throw ProtocolError("cloud '" + name + "' is empty");
  const std::size_t channels = images.front().channels;
  const auto dim =
      static_cast<Eigen::Index>(out_height * out_width * channels);

  LabeledPointCloud cloud;
  cloud.name = name;
  cloud.features = "raster-bilinear-" + std::to_string(out_height) + "x" +
                   std::to_string(out_width) + "x" + std::to_string(channels);
  cloud.points.resize(static_cast<Eigen::Index>(images.size()), dim);
  cloud.labels.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].channels != channels) {
      throw ProtocolError("cloud '" + name + "': mixed channel counts");
    }
    const std::vector<double> f =
        raster_features(images[i], out_height, out_width);
    cloud.points.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(f.data(), dim);
  }
  return cloud;
}

}  // namespace parteval
