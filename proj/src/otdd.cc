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

#include "parteval/otdd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "parteval/parallel.hpp"

namespace parteval {

using Eigen::MatrixXd;
using Eigen::SelfAdjointEigenSolver;
using Eigen::VectorXd;

std::vector<ClassId> LabeledPointCloud::classes() const {
  std::vector<ClassId> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void LabeledPointCloud::validate() const {
  if (points.rows() == 0 || points.cols() == 0) {
    throw ProtocolError("point cloud '" + name + "' is empty");
  }
  if (labels.size() != size()) {
    throw ProtocolError("point cloud '" + name + "' has " +
                        std::to_string(labels.size()) + " labels for " +
                        std::to_string(size()) + " points");
  }
  if (!points.allFinite()) {
    throw ProtocolError("point cloud '" + name + "' has non-finite values");
  }
}

GaussianSummary class_gaussian(const LabeledPointCloud& cloud, ClassId label) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < cloud.labels.size(); ++i) {
    if (cloud.labels[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.empty()) {
    throw ProtocolError("class " + std::to_string(label) +
                        " has no points in cloud '" + cloud.name + "'");
  }
  const MatrixXd members = cloud.points(rows, Eigen::all);
  GaussianSummary g;
  g.label = label;
  g.mean = members.colwise().mean().transpose();
  const MatrixXd centered = members.rowwise() - g.mean.transpose();
  g.covariance = (centered.transpose() * centered) /
                 static_cast<double>(members.rows());
  g.covariance = 0.5 * (g.covariance + g.covariance.transpose());
  return g;
}

namespace {

constexpr double kEigenClampTolerance = 1e-10;

// Eigenvalues of a symmetric matrix with tiny negatives clamped to zero.
VectorXd clamped_eigenvalues(const SelfAdjointEigenSolver<MatrixXd>& solver,
                             std::string_view what) {
  if (solver.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": eigendecomposition failed");
  }
  VectorXd values = solver.eigenvalues();
  if (values.size() == 0) return values;
  const double largest = values.cwiseAbs().maxCoeff();
  const double floor = -kEigenClampTolerance * std::max(1.0, largest);
  if (values.minCoeff() < floor) {
    std::ostringstream msg;
    msg << what << " is not positive semidefinite: eigenvalues in ["
        << values.minCoeff() << ", " << values.maxCoeff()
        << "], condition estimate "
        << largest / std::max(std::abs(values.minCoeff()),
                              std::numeric_limits<double>::min());
    throw NumericalError(msg.str());
  }
  return values.cwiseMax(0.0);
}

double sqrt_trace_of_product(const MatrixXd& sqrt_b, const MatrixXd& a) {
  MatrixXd m = sqrt_b * a * sqrt_b;
  m = 0.5 * (m + m.transpose());
  SelfAdjointEigenSolver<MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return clamped_eigenvalues(solver, "Bures cross term").cwiseSqrt().sum();
}

double bures_with_root(const GaussianSummary& a, const GaussianSummary& b,
                       const MatrixXd& sqrt_b) {
  if (a.mean.size() != b.mean.size()) {
    throw ProtocolError("Gaussian dimensions differ: " +
                        std::to_string(a.mean.size()) + " vs " +
                        std::to_string(b.mean.size()));
  }
  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double trace_term = a.covariance.trace() + b.covariance.trace() -
                            2.0 * sqrt_trace_of_product(sqrt_b, a.covariance);
  return std::max(0.0, mean_term + trace_term);
}

}  // namespace

MatrixXd psd_sqrt(const MatrixXd& m) {
  const MatrixXd sym = 0.5 * (m + m.transpose());
  SelfAdjointEigenSolver<MatrixXd> solver(sym);
  const VectorXd values = clamped_eigenvalues(solver, "covariance");
  return solver.eigenvectors() * values.cwiseSqrt().asDiagonal() *
         solver.eigenvectors().transpose();
}

double bures_w2_squared(const GaussianSummary& a, const GaussianSummary& b) {
  if (a.covariance.rows() != b.covariance.rows()) {
    throw ProtocolError("Gaussian dimensions differ");
  }
  return bures_with_root(a, b, psd_sqrt(b.covariance));
}

MatrixXd pairwise_cost(const LabeledPointCloud& src,
                       const LabeledPointCloud& dst, std::size_t workers) {
  src.validate();
  dst.validate();
  if (src.dim() != dst.dim()) {
    throw ProtocolError("feature dimensions differ: '" + src.name + "' has " +
                        std::to_string(src.dim()) + ", '" + dst.name +
                        "' has " + std::to_string(dst.dim()));
  }

  const std::vector<ClassId> src_classes = src.classes();
  const std::vector<ClassId> dst_classes = dst.classes();
  std::vector<GaussianSummary> src_g, dst_g;
  std::vector<MatrixXd> dst_roots;
  for (ClassId c : src_classes) src_g.push_back(class_gaussian(src, c));
  for (ClassId c : dst_classes) {
    dst_g.push_back(class_gaussian(dst, c));
    dst_roots.push_back(psd_sqrt(dst_g.back().covariance));
  }

  MatrixXd label_cost(src_classes.size(), dst_classes.size());
  parallel_for(src_classes.size() * dst_classes.size(), workers,
               [&](std::size_t k) {
                 const std::size_t i = k / dst_classes.size();
                 const std::size_t j = k % dst_classes.size();
                 label_cost(i, j) = bures_with_root(src_g[i], dst_g[j],
                                                    dst_roots[j]);
               });

  auto index_of = [](const std::vector<ClassId>& classes, ClassId c) {
    return static_cast<Eigen::Index>(
        std::lower_bound(classes.begin(), classes.end(), c) - classes.begin());
  };
  std::vector<Eigen::Index> src_idx(src.size()), dst_idx(dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    src_idx[i] = index_of(src_classes, src.labels[i]);
  }
  for (std::size_t j = 0; j < dst.size(); ++j) {
    dst_idx[j] = index_of(dst_classes, dst.labels[j]);
  }

  MatrixXd cost(src.size(), dst.size());
  parallel_for(src.size(), workers, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      cost(row, j) = (src.points.row(row) - dst.points.row(j)).squaredNorm() +
                     label_cost(src_idx[i], dst_idx[j]);
    }
  });
  return cost;
}

namespace {

double log_sum_exp(const VectorXd& v) {
  const double peak = v.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((v.array() - peak).exp().sum());
}

struct Potentials {
  VectorXd f;
  VectorXd g;
};

MatrixXd plan_from(const MatrixXd& cost, const Potentials& p, double eps) {
  MatrixXd z = (-cost).colwise() + p.f;
  z.rowwise() += p.g.transpose();
  return (z.array() / eps).exp().matrix();
}

double violation(const MatrixXd& plan, const VectorXd& mu,
                 const VectorXd& nu) {
  return (plan.rowwise().sum() - mu).cwiseAbs().sum() +
         (plan.colwise().sum().transpose() - nu).cwiseAbs().sum();
}

void sweep(const MatrixXd& cost, const VectorXd& log_mu,
           const VectorXd& log_nu, double eps, Potentials& p) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const VectorXd z = (p.g - cost.row(i).transpose()) / eps;
    p.f(i) = eps * (log_mu(i) - log_sum_exp(z));
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const VectorXd z = (p.f - cost.col(j)) / eps;
    p.g(j) = eps * (log_nu(j) - log_sum_exp(z));
  }
}

void check_weights(const VectorXd& w, std::string_view which) {
  if (w.size() == 0 || (w.array() < 0.0).any() || !w.allFinite() ||
      std::abs(w.sum() - 1.0) > 1e-12) {
    throw ProtocolError("sinkhorn: " + std::string(which) +
                        " weights must be non-negative and sum to 1");
  }
}

}  // namespace

SinkhornResult sinkhorn(const MatrixXd& cost, const VectorXd& mu,
                        const VectorXd& nu, const SinkhornOptions& options) {
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw ProtocolError("sinkhorn: cost is " + std::to_string(cost.rows()) +
                        "x" + std::to_string(cost.cols()) +
                        " but marginals have sizes " +
                        std::to_string(mu.size()) + " and " +
                        std::to_string(nu.size()));
  }
  check_weights(mu, "source");
  check_weights(nu, "target");
  if (!(options.epsilon > 0.0)) {
    throw ProtocolError("sinkhorn: epsilon must be positive");
  }
  if (!cost.allFinite()) throw ProtocolError("sinkhorn: non-finite cost");

  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > 0.0) rows.push_back(i);
  }
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    if (nu(j) > 0.0) cols.push_back(j);
  }
  const MatrixXd c = cost(rows, cols);
  const VectorXd a = mu(rows);
  const VectorXd b = nu(cols);

  SinkhornResult result;
  MatrixXd plan;
  if (rows.size() == 1 || cols.size() == 1) {
    // Only one coupling satisfies the marginals.
    plan = a * b.transpose();
    result.converged = true;
  } else {
    const double eps = options.epsilon;
    const VectorXd log_a = a.array().log();
    const VectorXd log_b = b.array().log();
    Potentials p{VectorXd::Zero(c.rows()), VectorXd::Zero(c.cols())};

    // Anneal from the cost scale down to the target epsilon, warm starting
    // the potentials; small epsilons converge very slowly from a cold start.
    double stage_eps = std::max(eps, c.cwiseAbs().maxCoeff());
    const double stage_tol = std::max(options.tol, 1e-4);
    while (stage_eps > eps && result.iterations < options.max_iter) {
      for (int k = 0; k < 100 && result.iterations < options.max_iter; ++k) {
        sweep(c, log_a, log_b, stage_eps, p);
        ++result.iterations;
        if (violation(plan_from(c, p, stage_eps), a, b) < stage_tol) break;
      }
      stage_eps = std::max(eps, stage_eps * 0.5);
    }
    result.marginal_violation = std::numeric_limits<double>::infinity();
    while (result.iterations < options.max_iter) {
      sweep(c, log_a, log_b, eps, p);
      ++result.iterations;
      result.marginal_violation = violation(plan_from(c, p, eps), a, b);
      if (result.marginal_violation < options.tol) {
        result.converged = true;
        break;
      }
    }
    plan = plan_from(c, p, eps);
  }
  result.marginal_violation = violation(plan, a, b);

  result.plan = MatrixXd::Zero(cost.rows(), cost.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      result.plan(rows[i], cols[j]) = plan(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j));
    }
  }
  result.cost = (plan.array() * c.array()).sum();
  return result;
}

SinkhornResult sinkhorn_symmetric(const MatrixXd& cost, const VectorXd& w,
                                  const SinkhornOptions& options) {
  if (cost.rows() != cost.cols() || cost.rows() != w.size()) {
    throw ProtocolError("sinkhorn_symmetric: cost must be square and match "
                        "the weights");
  }
  check_weights(w, "self");
  if (!(options.epsilon > 0.0)) {
    throw ProtocolError("sinkhorn: epsilon must be positive");
  }
  if (!cost.allFinite()) throw ProtocolError("sinkhorn: non-finite cost");

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > 0.0) support.push_back(i);
  }
  const MatrixXd raw = cost(support, support);
  const MatrixXd c = 0.5 * (raw + raw.transpose());
  const VectorXd a = w(support);
  const double eps = options.epsilon;

  SinkhornResult result;
  MatrixXd plan;
  if (support.size() == 1) {
    plan = MatrixXd::Ones(1, 1);
    result.converged = true;
  } else {
    const VectorXd log_a = a.array().log();
    VectorXd f = VectorXd::Zero(c.rows());
    VectorXd next(c.rows());
    while (result.iterations < options.max_iter) {
      for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const VectorXd z = (f - c.col(i)) / eps;
        next(i) = eps * (log_a(i) - log_sum_exp(z));
      }
      f = 0.5 * (f + next);
      ++result.iterations;
      if (violation(plan_from(c, {f, f}, eps), a, a) < options.tol) {
        result.converged = true;
        break;
      }
    }
    plan = plan_from(c, {f, f}, eps);
  }
  result.marginal_violation = violation(plan, a, a);
  result.plan = MatrixXd::Zero(cost.rows(), cost.cols());
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = 0; j < support.size(); ++j) {
      result.plan(support[i], support[j]) = plan(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j));
    }
  }
  result.cost = (plan.array() * c.array()).sum();
  return result;
}

namespace {

// Strict weak order on cloud contents used to fix the argument order of the
// cross term, which makes otdd_distance symmetric bit for bit.
bool content_less(const LabeledPointCloud& a, const LabeledPointCloud& b) {
  if (a.points.rows() != b.points.rows()) return a.points.rows() < b.points.rows();
  if (a.points.cols() != b.points.cols()) return a.points.cols() < b.points.cols();
  for (Eigen::Index i = 0; i < a.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.points.cols(); ++j) {
      if (a.points(i, j) != b.points(i, j)) return a.points(i, j) < b.points(i, j);
    }
  }
  return a.labels < b.labels;
}

VectorXd uniform(std::size_t n) {
  return VectorXd::Constant(static_cast<Eigen::Index>(n),
                            1.0 / static_cast<double>(n));
}

}  // namespace

OtddResult otdd_distance(const LabeledPointCloud& a, const LabeledPointCloud& b,
                         const OtddOptions& options) {
  const bool swapped = content_less(b, a);
  const LabeledPointCloud& first = swapped ? b : a;
  const LabeledPointCloud& second = swapped ? a : b;

  const MatrixXd cross = pairwise_cost(first, second, options.workers);
  double eps = 0.0;
  if (options.epsilon) {
    eps = *options.epsilon;
  } else {
    eps = options.epsilon_scale * cross.mean();
    // An all-zero cost has every coupling optimal; any epsilon will do.
    if (!(eps > 0.0)) eps = 1.0;
  }
  const SinkhornOptions solver{eps, options.max_iter, options.tol};

  const SinkhornResult aa =
      sinkhorn_symmetric(pairwise_cost(first, first, options.workers),
                         uniform(first.size()), solver);
  // Identical contents make the cross term the same symmetric problem; reuse
  // it so that the divergence is exactly zero.
  const bool identical = !content_less(first, second);
  const SinkhornResult bb =
      identical ? aa
                : sinkhorn_symmetric(
                      pairwise_cost(second, second, options.workers),
                      uniform(second.size()), solver);
  const SinkhornResult ab =
      identical ? aa
                : sinkhorn(cross, uniform(first.size()),
                           uniform(second.size()), solver);

  OtddResult result;
  result.epsilon = eps;
  result.cross_cost = ab.cost;
  result.self_cost_a = swapped ? bb.cost : aa.cost;
  result.self_cost_b = swapped ? aa.cost : bb.cost;
  result.iterations = ab.iterations + aa.iterations + bb.iterations;
  result.converged = ab.converged && aa.converged && bb.converged;
  result.distance = std::max(0.0, ab.cost - 0.5 * (aa.cost + bb.cost));
  return result;
}

}  // namespace parteval
