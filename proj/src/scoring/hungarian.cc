// scoring/hungarian.cc
//
// Copyright 2025  The mcfd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mcfd/hungarian.h"

#include <limits>
#include <vector>

#include "mcfd/common.h"

namespace mcfd {

namespace {

// Potentials algorithm over a square matrix: rows and columns are 1-indexed
// internally, column 0 is the auxiliary root.
std::vector<int> SolveSquare(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = p[static_cast<size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = a(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                           v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<size_t>(j)] > 0) {
      row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)]) - 1] = j - 1;
    }
  }
  return row_to_col;
}

}  // namespace

std::vector<int> HungarianMin(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) {
    return std::vector<int>(static_cast<size_t>(rows), -1);
  }
  if (!cost.allFinite()) throw InputError("HungarianMin: non-finite cost");

  // Pad to square with zero-cost dummies; assignments to a dummy become -1.
  const int n = std::max(rows, cols);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(rows, cols) = cost;
  std::vector<int> solved = SolveSquare(a);
  std::vector<int> out(static_cast<size_t>(rows), -1);
  for (int r = 0; r < rows; ++r) {
    const int c = solved[static_cast<size_t>(r)];
    out[static_cast<size_t>(r)] = c < cols ? c : -1;
  }
  return out;
}

std::vector<int> HungarianMax(const Eigen::MatrixXd& gain) {
  if (gain.rows() == 0 || gain.cols() == 0) {
    return std::vector<int>(static_cast<size_t>(gain.rows()), -1);
  }
  if (!gain.allFinite()) throw InputError("HungarianMax: non-finite gain");
  const double top = gain.maxCoeff();
  return HungarianMin((top - gain.array()).matrix());
}

}  // namespace mcfd
