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

// Optimal-transport dataset distance between labeled point clouds.
//
// The ground cost between a point x (label a) and y (label b) is
//   |x - y|^2 + W2^2(N_a, N_b)
// where N_a is the Gaussian fitted to the points of class a in its own cloud
// and W2^2 is the Bures-Wasserstein distance.  The distance between clouds is
// the debiased entropic transport cost under uniform weights.

#ifndef PARTEVAL_OTDD_HPP_
#define PARTEVAL_OTDD_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parteval/core.hpp"

namespace parteval {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledPointCloud {
  std::string name;
  Eigen::MatrixXd points;  // one row per point
  std::vector<ClassId> labels;
  // Free-form description of the feature space, e.g. "embedding" or
  // "raster-bilinear-8x8x1".  Carried into reports.
  std::string features;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
  // Sorted distinct labels.
  std::vector<ClassId> classes() const;
  // Throws ProtocolError on empty clouds, label count mismatch or non-finite
  // coordinates.
  void validate() const;
};

struct GaussianSummary {
  ClassId label = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric PSD, population (1/n) divisor
};

// Throws ProtocolError when the class has no points.
GaussianSummary class_gaussian(const LabeledPointCloud& cloud, ClassId label);

// Symmetric PSD square root.  Eigenvalues down to -1e-10 (relative to the
// largest magnitude) are clamped to zero; anything more negative throws
// NumericalError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

// |mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_b^1/2 S_a S_b^1/2)^1/2), clamped at 0.
double bures_w2_squared(const GaussianSummary& a, const GaussianSummary& b);

// n_src x n_dst ground cost.  Label-pair distances are computed once per pair.
Eigen::MatrixXd pairwise_cost(const LabeledPointCloud& src,
                              const LabeledPointCloud& dst,
                              std::size_t workers = 1);

struct SinkhornOptions {
  double epsilon = 0.05;
  std::size_t max_iter = 2000;
  double tol = 1e-7;
};

struct SinkhornResult {
  Eigen::MatrixXd plan;
  double cost = 0.0;  // <plan, cost>
  std::size_t iterations = 0;
  double marginal_violation = 0.0;  // L1, rows plus columns
  bool converged = false;
};

// Log-domain Sinkhorn with epsilon scaling.  Weights must be non-negative and
// sum to one within 1e-12; zero-weight rows and columns get zero mass.
// Hitting max_iter is not an error: the result is flagged unconverged.
SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const Eigen::VectorXd& mu,
                        const Eigen::VectorXd& nu,
                        const SinkhornOptions& options);

// Entropic self-transport of `w` onto itself under a symmetric cost.  Uses
// the averaged symmetric fixed point, which converges in far fewer sweeps
// than alternating updates; the plan is symmetric by construction.
SinkhornResult sinkhorn_symmetric(const Eigen::MatrixXd& cost,
                                  const Eigen::VectorXd& w,
                                  const SinkhornOptions& options);

struct OtddOptions {
  // Absolute regularization.  Unset: epsilon_scale * mean cross cost.
  std::optional<double> epsilon;
  double epsilon_scale = 0.05;
  std::size_t max_iter = 2000;
  double tol = 1e-7;
  std::size_t workers = 1;
};

struct OtddResult {
  double distance = 0.0;
  double epsilon = 0.0;
  double cross_cost = 0.0;
  double self_cost_a = 0.0;
  double self_cost_b = 0.0;
  std::size_t iterations = 0;  // summed over the three transport problems
  bool converged = false;      // all three converged
};

// OT(a,b) - (OT(a,a) + OT(b,b)) / 2, clamped at zero.  Symmetric bit for bit.
OtddResult otdd_distance(const LabeledPointCloud& a, const LabeledPointCloud& b,
                         const OtddOptions& options = {});

}  // namespace parteval

#endif  // PARTEVAL_OTDD_HPP_
