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

#include <random>

#include <gtest/gtest.h>

#include "parteval/importance.hpp"

namespace parteval {
namespace {

PartImportance make_pi(std::map<PartId, double> values) {
  PartImportance pi;
  pi.image_id = "x";
  pi.values = std::move(values);
  return pi;
}

AttributionMap attr_of(Raster<float> values) {
  return AttributionMap{"x", "m", ClassMode::kPredicted, std::move(values)};
}

TEST(Aggregate, SumAndMean) {
  const PartAnnotation ann("x", Raster<PartId>(2, 2, {1, 2, 1, 2}));
  const auto attr = attr_of(Raster<float>(2, 2, {1, 2, 3, 4}));
  EXPECT_EQ(aggregate(attr, ann, Aggregation::kSumPerPart).values,
            (std::map<PartId, double>{{1, 4.0}, {2, 6.0}}));
  EXPECT_EQ(aggregate(attr, ann, Aggregation::kMeanPerPart).values,
            (std::map<PartId, double>{{1, 2.0}, {2, 3.0}}));
  const auto zeros = attr_of(Raster<float>(2, 2, 0.0f));
  for (auto mode : {Aggregation::kSumPerPart, Aggregation::kMeanPerPart}) {
    EXPECT_EQ(aggregate(zeros, ann, mode).values,
              (std::map<PartId, double>{{1, 0.0}, {2, 0.0}}));
  }
}

TEST(Aggregate, RejectsMismatch) {
  const PartAnnotation ann("x", Raster<PartId>(2, 2, {1, 2, 1, 2}));
  EXPECT_THROW(aggregate(attr_of(Raster<float>(2, 3)), ann,
                         Aggregation::kSumPerPart),
               ProtocolError);
  AttributionMap other = attr_of(Raster<float>(2, 2));
  other.image_id = "y";
  EXPECT_THROW(aggregate(other, ann, Aggregation::kSumPerPart), ProtocolError);
}

TEST(Aggregate, SumConservesForegroundMass) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    Raster<PartId> mask(5, 7, PartId{0});
    for (PartId& v : mask.values) v = static_cast<PartId>(rng() % 4);
    mask.values[0] = 1;
    Raster<float> values(5, 7, 0.0f);
    for (float& v : values.values) v = normal(rng);
    const PartAnnotation ann("x", mask);
    const auto pi = aggregate(attr_of(values), ann, Aggregation::kSumPerPart);
    double parts = 0, foreground = 0;
    for (const auto& [k, v] : pi.values) parts += v;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
      if (mask.values[i] != 0) foreground += values.values[i];
    }
    EXPECT_NEAR(parts, foreground, 1e-9);
    EXPECT_EQ(pi.values.size(), ann.part_count());
  }
}

TEST(RemovalOrder, Examples) {
  const auto pi = make_pi({{1, 0.5}, {2, 0.2}, {3, 0.3}});
  EXPECT_EQ(removal_order(pi, Direction::kLeastFirst),
            (std::vector<PartId>{2, 3, 1}));
  EXPECT_EQ(removal_order(pi, Direction::kMostFirst),
            (std::vector<PartId>{1, 3, 2}));
  const auto tie = make_pi({{1, 0.4}, {2, 0.4}});
  EXPECT_EQ(removal_order(tie, Direction::kLeastFirst),
            (std::vector<PartId>{1, 2}));
  EXPECT_EQ(removal_order(tie, Direction::kMostFirst),
            (std::vector<PartId>{1, 2}));
}

TEST(SelectThresholdSubset, Examples) {
  const auto pi = make_pi({{1, 0.5}, {2, 0.3}, {3, 0.2}});
  EXPECT_EQ(select_threshold_subset(pi, 0.4, Direction::kLeastFirst),
            (PartSubset{2, 3}));
  EXPECT_EQ(select_threshold_subset(pi, 0.4, Direction::kMostFirst),
            (PartSubset{1}));
  const auto negative = make_pi({{1, -1.0}, {2, -2.0}});
  for (double t : {0.1, 0.5, 0.9}) {
    EXPECT_EQ(select_threshold_subset(negative, t, Direction::kLeastFirst),
              (PartSubset{2}));
  }
  EXPECT_TRUE(negative.has_negative());
  EXPECT_FALSE(pi.has_negative());
}

TEST(SelectThresholdSubset, ClampsNegativeMass) {
  // Clamped shares: 1 -> 0, 2 -> 0.25, 3 -> 0.75.
  const auto pi = make_pi({{1, -4.0}, {2, 1.0}, {3, 3.0}});
  EXPECT_EQ(select_threshold_subset(pi, 0.2, Direction::kLeastFirst),
            (PartSubset{1, 2}));
  EXPECT_EQ(select_threshold_subset(pi, 0.3, Direction::kLeastFirst),
            (PartSubset{1, 2, 3}));
  EXPECT_EQ(select_threshold_subset(pi, 0.7, Direction::kMostFirst),
            (PartSubset{3}));
}

std::map<PartId, double> random_values(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 2.0);
  const int p = 1 + static_cast<int>(rng() % 8);
  std::map<PartId, double> values;
  for (int k = 1; k <= p; ++k) values[k] = u(rng);
  return values;
}

TEST(SelectThresholdSubset, MonotoneInThreshold) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pi = make_pi(random_values(rng));
    for (auto dir : {Direction::kLeastFirst, Direction::kMostFirst}) {
      PartSubset previous;
      for (double t = 0.05; t < 1.0; t += 0.05) {
        const PartSubset current = select_threshold_subset(pi, t, dir);
        EXPECT_TRUE(previous.is_subset_of(current));
        previous = current;
      }
    }
  }
}

TEST(RemovalOrder, ReverseAndScaleInvariance) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pi = make_pi(random_values(rng));
    auto least = removal_order(pi, Direction::kLeastFirst);
    const auto most = removal_order(pi, Direction::kMostFirst);
    std::reverse(least.begin(), least.end());
    EXPECT_EQ(least, most);  // continuous draws are distinct

    PartImportance scaled = pi;
    for (auto& [k, v] : scaled.values) v *= 3.5;
    for (auto dir : {Direction::kLeastFirst, Direction::kMostFirst}) {
      EXPECT_EQ(removal_order(pi, dir), removal_order(scaled, dir));
      for (double t : {0.2, 0.4, 0.6, 0.8}) {
        EXPECT_EQ(select_threshold_subset(pi, t, dir),
                  select_threshold_subset(scaled, t, dir));
      }
    }
  }
}

}  // namespace
}  // namespace parteval
