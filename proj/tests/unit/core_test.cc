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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "parteval/core.hpp"

namespace parteval {
namespace {

LogitRecord rec(std::vector<double> logits) {
  return LogitRecord("a", PartSubset(), std::move(logits));
}

TEST(PredictedClass, Examples) {
  EXPECT_EQ(predicted_class(rec({0.1, 0.9, 0.3})), 1);
  EXPECT_EQ(predicted_class(rec({0.5, 0.5})), 0);
  EXPECT_EQ(predicted_class(rec({-1.0})), 0);
}

TEST(PredictedClass, EmptyLogitsRejected) {
  EXPECT_THROW(rec({}), ProtocolError);
  EXPECT_THROW(predicted_class(std::span<const double>()), ProtocolError);
}

TEST(ClassScore, Examples) {
  EXPECT_DOUBLE_EQ(class_score(rec({0, 0}), 0, ScoreFn::kSoftmaxProbability),
                   0.5);
  EXPECT_DOUBLE_EQ(
      class_score(rec({0, 0, 0, 0}), 2, ScoreFn::kSoftmaxProbability), 0.25);
  EXPECT_DOUBLE_EQ(class_score(rec({1.5, -2}), 1, ScoreFn::kRawLogit), -2.0);
}

TEST(ClassScore, LargeLogitsDoNotOverflow) {
  // Reference in extended precision: 1 / (1 + e^-1000).
  const long double reference = 1.0L / (1.0L + std::exp(-1000.0L));
  const double got =
      class_score(rec({1000, 0}), 0, ScoreFn::kSoftmaxProbability);
  EXPECT_TRUE(std::isfinite(got));
  EXPECT_NEAR(got, static_cast<double>(reference), 1e-12);
}

TEST(ClassScore, OutOfRangeClassRejected) {
  EXPECT_THROW(class_score(rec({0, 0}), 2, ScoreFn::kRawLogit), ProtocolError);
  EXPECT_THROW(class_score(rec({0, 0}), -1, ScoreFn::kRawLogit),
               ProtocolError);
}

TEST(Softmax, IsProbabilityVectorForRandomLogits) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(-1, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 12;
    std::vector<double> logits(n);
    const double spread = std::pow(10.0, scale(rng));
    std::normal_distribution<double> normal(0, spread);
    for (double& v : logits) v = normal(rng);
    const std::vector<double> p = softmax(logits);
    double total = 0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);

    // Argmax is shift invariant and agrees with the softmax scores.
    std::vector<double> shifted = logits;
    for (double& v : shifted) v += 123.25;
    const LogitRecord r = rec(logits);
    EXPECT_EQ(predicted_class(r), predicted_class(rec(shifted)));
    ClassId best = 0;
    for (std::size_t c = 1; c < n; ++c) {
      if (class_score(r, c, ScoreFn::kSoftmaxProbability) >
          class_score(r, best, ScoreFn::kSoftmaxProbability)) {
        best = static_cast<ClassId>(c);
      }
    }
    EXPECT_EQ(predicted_class(r), best);
  }
}

TEST(LogitRecord, RejectsNonFinite) {
  EXPECT_THROW(rec({0.0, std::nan("")}), ProtocolError);
  EXPECT_THROW(rec({INFINITY}), ProtocolError);
}

TEST(PartSubset, KeysAreCanonical) {
  EXPECT_EQ(PartSubset().key(), "orig");
  EXPECT_EQ((PartSubset{4, 1, 3}).key(), "1-3-4");
  EXPECT_EQ(PartSubset::parse_key("1-3-4"), (PartSubset{1, 3, 4}));
  EXPECT_EQ(PartSubset::parse_key("orig"), PartSubset());
  for (const char* bad : {"", "3-1", "1--2", "-1", "1-", "a", "1-1", "0",
                          "01", "1 2"}) {
    EXPECT_THROW(PartSubset::parse_key(bad), ProtocolError) << bad;
  }
  EXPECT_THROW((PartSubset{2, 2}), ProtocolError);
  EXPECT_THROW((PartSubset{0}), ProtocolError);
}

TEST(PartSubset, SubsetRelations) {
  const PartSubset all{1, 2, 3};
  EXPECT_TRUE((PartSubset{1, 3}).is_subset_of(all));
  EXPECT_TRUE(PartSubset().is_subset_of(all));
  EXPECT_FALSE((PartSubset{4}).is_subset_of(all));
  EXPECT_TRUE(all.contains(2));
  EXPECT_FALSE(all.contains(5));
}

TEST(PartAnnotation, DerivesPartIds) {
  PartAnnotation ann("x", Raster<PartId>(2, 3, {0, 7, 3, 3, 0, 7}));
  EXPECT_EQ(ann.part_ids(), (std::vector<PartId>{3, 7}));
  EXPECT_EQ(ann.pixel_count(3), 2u);
  EXPECT_EQ(ann.pixel_count(7), 2u);
  EXPECT_EQ(ann.pixel_count(1), 0u);
}

TEST(PartAnnotation, RejectsEmptyAndMismatchedMasks) {
  EXPECT_THROW(PartAnnotation("x", Raster<PartId>(2, 2, PartId{0})),
               ProtocolError);
  EXPECT_THROW(PartAnnotation("x", Raster<PartId>(1, 2, {1, 2}), {1, 3}),
               ProtocolError);
}

TEST(ImageRecord, ValidateReportsEveryViolation) {
  PartAnnotation ann("x", Raster<PartId>(1, 2, {1, 2}));
  ImageRecord record{ann, 5, {}, {}};
  record.variants.emplace(PartSubset{3},
                          LogitRecord("x", PartSubset{3}, {0.0, 1.0}));
  record.attributions.emplace(
      AttributionKey{"m", ClassMode::kPredicted},
      AttributionMap{"x", "m", ClassMode::kPredicted, Raster<float>(2, 2)});
  const auto errors = validate(record);
  // Missing original, foreign subset, label out of range, bad raster size.
  EXPECT_EQ(errors.size(), 4u);
}

TEST(EvaluationConfig, ResolvesReferenceAndValidates) {
  EvaluationConfig config;
  EXPECT_EQ(config.resolved_accuracy_reference(),
            AccuracyReference::kOriginalPrediction);
  config.class_mode = ClassMode::kTarget;
  EXPECT_EQ(config.resolved_accuracy_reference(),
            AccuracyReference::kGroundTruth);
  config.accuracy_reference = AccuracyReference::kOriginalPrediction;
  EXPECT_EQ(config.resolved_accuracy_reference(),
            AccuracyReference::kOriginalPrediction);
  EXPECT_NO_THROW(config.validate());
  config.thresholds = {0.4, 0.2};
  EXPECT_THROW(config.validate(), ProtocolError);
  config.thresholds = {1.0};
  EXPECT_THROW(config.validate(), ProtocolError);
  config.thresholds = {0.5};
  config.workers = 0;
  EXPECT_THROW(config.validate(), ProtocolError);
}

TEST(Names, RoundTrip) {
  for (auto m : {ClassMode::kPredicted, ClassMode::kTarget}) {
    EXPECT_EQ(parse_class_mode(to_string(m)), m);
  }
  for (auto a : {Aggregation::kSumPerPart, Aggregation::kMeanPerPart}) {
    EXPECT_EQ(parse_aggregation(to_string(a)), a);
  }
  for (auto f : {ScoreFn::kSoftmaxProbability, ScoreFn::kRawLogit}) {
    EXPECT_EQ(parse_score_fn(to_string(f)), f);
  }
  EXPECT_THROW(parse_class_mode("both"), ProtocolError);
}

}  // namespace
}  // namespace parteval
