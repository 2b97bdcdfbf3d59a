// chanclust/nmesc.cc
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

#include "mcfd/nmesc.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mcfd/common.h"

namespace mcfd {

namespace {

// Row-wise binarization to the p strongest neighbors: the cut is the p-th
// largest off-diagonal value and every entry tied with it survives, so rows
// of equal affinities degrade to complete graphs (one cluster) instead of an
// arbitrary index-ordered subgraph. The diagonal is kept on top of the p.
Eigen::MatrixXd BinarizeRows(const Eigen::MatrixXd& a, int p) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    values.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) values.push_back(a(i, j));
    const int keep = std::min(p, n - 1);
    std::nth_element(values.begin(), values.begin() + (keep - 1), values.end(),
                     std::greater<double>());
    const double cut = values[static_cast<size_t>(keep - 1)];
    for (int j = 0; j < n; ++j)
      if (a(i, j) >= cut) b(i, j) = 1.0;
    b(i, i) = 1.0;
  }
  return b;
}

Eigen::MatrixXd NormalizedLaplacian(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  Eigen::VectorXd deg = w.rowwise().sum();
  Eigen::VectorXd dinv_sqrt(n);
  for (int i = 0; i < n; ++i) {
    dinv_sqrt(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  }
  Eigen::MatrixXd lap =
      Eigen::MatrixXd::Identity(n, n) -
      dinv_sqrt.asDiagonal() * w * dinv_sqrt.asDiagonal();
  // Round-off can break exact symmetry; the eigensolver assumes it.
  return 0.5 * (lap + lap.transpose());
}

// gap(K) = lambda_K - lambda_{K-1} for K in [1, max_k], eigenvalues
// ascending. Index 0 of the result corresponds to K = 1.
std::vector<double> Eigengaps(const Eigen::VectorXd& evals, int max_k) {
  std::vector<double> gaps;
  gaps.reserve(static_cast<size_t>(max_k));
  for (int k = 1; k <= max_k; ++k) {
    gaps.push_back(evals(k) - evals(k - 1));
  }
  return gaps;
}

// Gaps within half of the largest one are treated as tied, and ties resolve
// toward the smaller K: a sparsely binarized graph often shows weak
// intra-cluster modes above the true cluster jump, and preferring fewer
// streams keeps those from inflating the estimate.
int ArgmaxGap(const std::vector<double>& gaps) {
  double gmax = *std::max_element(gaps.begin(), gaps.end());
  if (gmax <= 0.0) return 1;
  for (int i = 0; i < static_cast<int>(gaps.size()); ++i) {
    if (gaps[i] >= 0.5 * gmax) return i + 1;  // gap index 0 is K = 1
  }
  return 1;
}

std::vector<int> RelabelByFirstUse(const std::vector<int>& labels, int k) {
  std::vector<int> remap(static_cast<size_t>(k), -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    int& m = remap[static_cast<size_t>(labels[i])];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

double LloydInertia(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng,
                    int max_iters, std::vector<int>* labels_out) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());

  // k-means++ seeding: first center uniform, then proportional to the
  // squared distance to the nearest center so far.
  Eigen::MatrixXd centers(k, d);
  std::uniform_int_distribution<int> uni(0, n - 1);
  centers.row(0) = points.row(uni(rng));
  Eigen::VectorXd d2 =
      (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = uni(rng);
    } else {
      std::vector<double> w(d2.data(), d2.data() + n);
      std::discrete_distribution<int> dist(w.begin(), w.end());
      pick = dist(rng);
    }
    centers.row(c) = points.row(pick);
    d2 = d2.cwiseMin(
        (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<size_t>(n), 0);
  std::vector<int> counts(static_cast<size_t>(k), 0);
  double inertia = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double dist = (points.row(i) - centers.row(c)).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (labels[static_cast<size_t>(i)] != best) {
        labels[static_cast<size_t>(i)] = best;
        changed = true;
      }
      inertia += best_d;
    }
    // Re-seed any emptied cluster with the point farthest from its center.
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) ++counts[static_cast<size_t>(labels[i])];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) continue;
      int far = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[static_cast<size_t>(labels[i])] <= 1) continue;
        double dist =
            (points.row(i) - centers.row(labels[i])).squaredNorm();
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      --counts[static_cast<size_t>(labels[far])];
      labels[static_cast<size_t>(far)] = c;
      ++counts[static_cast<size_t>(c)];
      changed = true;
    }
    if (!changed && iter > 0) break;
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        centers.row(c) /= static_cast<double>(counts[static_cast<size_t>(c)]);
      }
    }
  }
  *labels_out = std::move(labels);
  return inertia;
}

}  // namespace

std::vector<int> KMeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                        int restarts, int max_iters) {
  const int n = static_cast<int>(points.rows());
  if (n == 0) return {};
  if (k <= 0) throw InputError("KMeans: k must be positive");
  if (k > n) throw InputError(StrCat("KMeans: k=", k, " exceeds points=", n));
  if (restarts < 1) restarts = 1;
  if (k == 1) return std::vector<int>(static_cast<size_t>(n), 0);

  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(MixSeed(seed, static_cast<uint64_t>(r)));
    std::vector<int> labels;
    double inertia = LloydInertia(points, k, rng, max_iters, &labels);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = std::move(labels);
    }
  }
  return RelabelByFirstUse(best_labels, k);
}

ClusterAssignment Nmesc(const Eigen::MatrixXd& affinity,
                        const NmescOptions& opts, NmescInfo* info) {
  const int n = static_cast<int>(affinity.rows());
  if (n == 0) throw InputError("Nmesc: empty affinity");
  if (affinity.cols() != n) throw InputError("Nmesc: affinity must be square");
  if ((affinity - affinity.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw InputError("Nmesc: affinity must be symmetric");
  }
  if (n == 1) {
    if (info) *info = NmescInfo{1, 0.0, {}};
    return ClusterAssignment{{0}, 1};
  }

  const int max_clusters = std::max(1, std::min(opts.max_clusters, n));
  // K_hat needs gap(K) = lambda_K - lambda_{K-1}, so K can reach n - 1.
  const int max_k = std::min(max_clusters, n - 1);

  std::vector<int> p_range = opts.p_range;
  if (p_range.empty()) {
    int hi = static_cast<int>(std::ceil(0.5 * n));
    for (int p = 2; p <= std::max(2, hi); ++p) p_range.push_back(p);
  }
  for (int& p : p_range) p = std::min(std::max(p, 1), n);
  std::sort(p_range.begin(), p_range.end());
  p_range.erase(std::unique(p_range.begin(), p_range.end()), p_range.end());

  int best_p = p_range.front();
  double best_ratio = std::numeric_limits<double>::infinity();
  std::vector<double> best_gaps;
  for (int p : p_range) {
    Eigen::MatrixXd b = BinarizeRows(affinity, p);
    Eigen::MatrixXd sym = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        NormalizedLaplacian(sym), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(StrCat("Nmesc: eigensolver failed at p=", p));
    }
    std::vector<double> gaps = Eigengaps(es.eigenvalues(), max_k);
    double gmax = *std::max_element(gaps.begin(), gaps.end());
    double ratio = gmax > 1e-12
                       ? (static_cast<double>(p) / n) / gmax
                       : std::numeric_limits<double>::infinity();
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_p = p;
      best_gaps = std::move(gaps);
    }
  }
  if (best_gaps.empty()) {
    // Every candidate produced a degenerate spectrum; treat as one cluster.
    if (info) *info = NmescInfo{best_p, best_ratio, {}};
    return ClusterAssignment{std::vector<int>(static_cast<size_t>(n), 0), 1};
  }

  const int k_hat = ArgmaxGap(best_gaps);
  if (info) *info = NmescInfo{best_p, best_ratio, best_gaps};
  if (k_hat == 1) {
    return ClusterAssignment{std::vector<int>(static_cast<size_t>(n), 0), 1};
  }

  Eigen::MatrixXd b = BinarizeRows(affinity, best_p);
  Eigen::MatrixXd sym = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(NormalizedLaplacian(sym));
  if (es.info() != Eigen::Success) {
    throw Error("Nmesc: eigensolver failed on the selected graph");
  }
  Eigen::MatrixXd embedding = es.eigenvectors().leftCols(k_hat);
  std::vector<int> labels =
      KMeans(embedding, k_hat, opts.seed, opts.kmeans_restarts);
  return ClusterAssignment{std::move(labels), k_hat};
}

}  // namespace mcfd
