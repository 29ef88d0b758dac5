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

#include "lp_oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace parteval::fixtures {

namespace {

constexpr double kPivotEps = 1e-12;

// Canonical-form tableau: each basic column is a unit vector.
struct Tableau {
  std::vector<std::vector<double>> a;  // rows x cols
  std::vector<double> b;
  std::vector<int> basis;

  void pivot(int row, int col) {
    const double p = a[row][col];
    for (double& v : a[row]) v /= p;
    b[row] /= p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      const double f = a[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] -= f * a[row][j];
      b[i] -= f * b[row];
    }
    basis[row] = col;
  }

  // Minimizes cost . x over columns with allowed[j]; Bland's rule.
  void minimize(const std::vector<double>& cost,
                const std::vector<bool>& allowed) {
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(cost.size());
    for (int guard = 0; guard < 100000; ++guard) {
      int entering = -1;
      for (int j = 0; j < cols && entering < 0; ++j) {
        if (!allowed[j]) continue;
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        double reduced = cost[j];
        for (int i = 0; i < rows; ++i) reduced -= cost[basis[i]] * a[i][j];
        if (reduced < -1e-11) entering = j;
      }
      if (entering < 0) return;
      int leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        if (a[i][entering] <= kPivotEps) continue;
        const double ratio = b[i] / a[i][entering];
        if (ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 && leaving >= 0 &&
             basis[i] < basis[leaving])) {
          best = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) throw std::runtime_error("LP unbounded");
      pivot(leaving, entering);
    }
    throw std::runtime_error("simplex did not terminate");
  }
};

}  // namespace

double exact_transport_cost(const Eigen::MatrixXd& cost,
                            const Eigen::VectorXd& mu,
                            const Eigen::VectorXd& nu) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const int structural = n * m;
  // Row sums, then all column sums but the last (implied by mass balance).
  const int rows = n + m - 1;
  const int cols = structural + rows;

  Tableau t;
  t.a.assign(rows, std::vector<double>(cols, 0.0));
  t.b.assign(rows, 0.0);
  t.basis.resize(rows);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) t.a[i][i * m + j] = 1.0;
    t.b[i] = mu(i);
  }
  for (int j = 0; j + 1 < m; ++j) {
    for (int i = 0; i < n; ++i) t.a[n + j][i * m + j] = 1.0;
    t.b[n + j] = nu(j);
  }
  for (int r = 0; r < rows; ++r) {
    t.a[r][structural + r] = 1.0;
    t.basis[r] = structural + r;
  }

  std::vector<double> phase1(cols, 0.0);
  std::fill(phase1.begin() + structural, phase1.end(), 1.0);
  t.minimize(phase1, std::vector<bool>(cols, true));
  for (int r = 0; r < rows; ++r) {
    if (t.basis[r] < structural) continue;
    if (t.b[r] > 1e-9) throw std::runtime_error("transport LP infeasible");
    for (int j = 0; j < structural; ++j) {
      if (std::abs(t.a[r][j]) > 1e-9) {
        t.pivot(r, j);
        break;
      }
    }
  }

  std::vector<double> phase2(cols, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) phase2[i * m + j] = cost(i, j);
  }
  std::vector<bool> allowed(cols, false);
  std::fill(allowed.begin(), allowed.begin() + structural, true);
  t.minimize(phase2, allowed);

  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (t.basis[r] < structural) total += phase2[t.basis[r]] * t.b[r];
  }
  return total;
}

double brute_force_assignment_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

}  // namespace parteval::fixtures
